/* Build: cargo build -p minorext-ffi --release
 *        cc crates/ffi/examples/scan.c -Icrates/ffi/include \
 *           target/release/libminorext_ffi.a -lpthread -ldl -lm -o scan */
#include <stdio.h>
#include "minorext.h"

int main(void) {
    MxSymMatrix *w = NULL;
    if (mx_sym_matrix_wigner(30, 2.0, 42, 0, &w) != MX_OK) {
        fprintf(stderr, "%s\n", mx_last_error_message());
        return 1;
    }
    MxScanResult r;
    size_t hi[3], lo[3];
    MxStatus s = mx_scan(w, 3, false, MX_SCAN_PRUNED, 4, 0, &r, hi, lo, 3);
    if (s != MX_OK) {
        fprintf(stderr, "scan failed (%d): %s\n", (int)s, mx_last_error_message());
        mx_sym_matrix_free(w);
        return 1;
    }
    double env;
    mx_envelope_wigner(30, 3, 2.0, &env);
    printf("minorext %s\n", mx_version());
    printf("T = %.6f at {%zu, %zu, %zu}, V = %.6f at {%zu, %zu, %zu}\n",
           r.t, hi[0], hi[1], hi[2], r.v, lo[0], lo[1], lo[2]);
    printf("T/env = %.4f, V/env = %.4f\n", r.t / env, r.v / env);
    mx_sym_matrix_free(w);
    return 0;
}
