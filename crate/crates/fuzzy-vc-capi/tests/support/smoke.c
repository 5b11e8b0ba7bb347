/* Smoke test for the C ABI: parse, query, error handling, cleanup. */
#include <stdio.h>
#include <string.h>

#include "fuzzy_vc.h"

static int failures = 0;

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
            failures++;                                                    \
        }                                                                  \
    } while (0)

int main(void) {
    const char *triangle =
        "{\"type\":\"set_system\",\"ground_size\":3,"
        "\"sets\":[[0,1],[1,2],[0,2]]}";

    FvcInstance *h = NULL;
    CHECK(fvc_instance_parse(triangle, &h) == FvcStatus_Ok);
    CHECK(h != NULL);

    int64_t vc = -99;
    CHECK(fvc_vc_dimension(h, &vc) == FvcStatus_Ok);
    CHECK(vc == 1);

    uint64_t tau = 0;
    CHECK(fvc_transversal_number(h, &tau) == FvcStatus_Ok);
    CHECK(tau == 2);

    char *json = NULL;
    CHECK(fvc_fractional_transversal(h, &json) == FvcStatus_Ok);
    CHECK(json != NULL && strstr(json, "\"tau_star\":\"3/2\"") != NULL);
    fvc_string_free(json);

    char *digest = NULL;
    CHECK(fvc_instance_digest(h, &digest) == FvcStatus_Ok);
    CHECK(digest != NULL && strlen(digest) == 64);
    fvc_string_free(digest);

    char *net = NULL;
    CHECK(fvc_find_eps_net_greedy(h, NULL, 1, 3, &net) == FvcStatus_Ok);
    CHECK(net != NULL && strstr(net, "\"heavy_sets\":3") != NULL);
    fvc_string_free(net);

    char *bound = NULL;
    CHECK(fvc_sauer_bound(2, 3, &bound) == FvcStatus_Ok);
    CHECK(bound != NULL && strcmp(bound, "13") == 0);
    fvc_string_free(bound);

    fvc_instance_free(h);

    /* Error path: invalid measure must report ParseError with a message. */
    FvcInstance *bad = NULL;
    const char *bad_measure = "{\"type\":\"measure\",\"weights\":[\"1/2\",\"1/3\"]}";
    CHECK(fvc_instance_parse(bad_measure, &bad) == FvcStatus_ParseError);
    CHECK(bad == NULL);
    char *msg = fvc_last_error_message();
    CHECK(msg != NULL && strlen(msg) > 0);
    fvc_string_free(msg);

    /* Null handles are rejected, not dereferenced. */
    CHECK(fvc_vc_dimension(NULL, &vc) == FvcStatus_InvalidArgument);

    if (failures == 0) {
        printf("c-abi smoke ok\n");
        return 0;
    }
    return 1;
}
