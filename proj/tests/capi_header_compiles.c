/* The public header must stay consumable from plain C. */
#include <stdio.h>
#include <string.h>

#include "fslab.h"

int main(void) {
    if (strlen(fslab_version()) == 0) return 1;
    double trend = 0.0;
    if (fslab_split_trend("BTC", "test_bull", &trend) != FSLAB_OK) return 1;
    if (trend < 79.0 || trend > 80.0) return 1;
    if (fslab_split_trend("BTC", NULL, &trend) != FSLAB_ERROR_INVALID_ARGUMENT) return 1;
    printf("fslab %s ok, btc bull trend %.2f%%\n", fslab_version(), trend);
    return 0;
}
