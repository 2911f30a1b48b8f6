/* Minimal consumer of the forcinglab C ABI.
 *
 * Build (from the repository root, after `cargo build -p forcinglab-ffi`):
 *   cc crates/ffi/examples/demo.c -Icrates/ffi/include \
 *      target/debug/libforcinglab_ffi.a -lpthread -ldl -lm -o demo
 */
#include <stdio.h>
#include <stdlib.h>

#include "forcinglab.h"

int main(void) {
    printf("forcinglab %s\n", flab_version());

    FlabTournament *h5 = NULL;
    FlabTournament *s7 = NULL;
    if (flab_tournament_from_catalog("H_5", &h5) != FlabStatusOk ||
        flab_tournament_from_catalog("S_7", &s7) != FlabStatusOk) {
        fprintf(stderr, "catalog lookup failed\n");
        return 1;
    }

    uint64_t copies = 0;
    if (flab_count_copies(h5, s7, &copies) != FlabStatusOk) {
        fprintf(stderr, "copy count failed\n");
        return 1;
    }
    printf("n(H_5, S_7) = %llu\n", (unsigned long long)copies);

    char *density = NULL;
    if (flab_expected_density(h5, &density) == FlabStatusOk) {
        printf("expected density of H_5 = %s\n", density);
        flab_string_free(density);
    }

    FlabTournament *h14 = NULL;
    flab_tournament_from_catalog("H_6^14", &h14);
    char *poly = NULL;
    if (flab_density_polynomial(h14, "A_x", &poly) == FlabStatusOk) {
        printf("d*(H_6^14, A_x) = %s\n", poly);
        flab_string_free(poly);
    }

    flab_tournament_free(h14);
    flab_tournament_free(s7);
    flab_tournament_free(h5);
    return copies == 21 ? 0 : 1;
}
