#include <stdio.h>
#include <math.h>
#include "dispatchkit.h"

int main(void) {
    DkProblem *p = NULL;
    if (dk_problem_reference_fleet(&p) != DK_STATUS_OK) return 10;

    DkRegimeReport r;
    if (dk_classify(p, &r) != DK_STATUS_OK || r.regime != DK_REGIME_DEFICIT) return 11;

    if (dk_problem_set_lambda(p, 1.0) != DK_STATUS_OK) return 12;
    DkSolution *s = NULL;
    if (dk_solve(p, DK_MODE_MULTI, 0.0, &s) != DK_STATUS_OK) return 13;
    double e[5];
    if (dk_solution_energies(s, e, 5) != DK_STATUS_OK) return 14;
    for (int i = 0; i < 5; i++) {
        if (fabs(e[i] - 30.0) > 1e-9) return 15;
    }
    dk_solution_free(s);

    DkSolution *bad = NULL;
    if (dk_solve(p, DK_MODE_COST, 0.0, &bad) != DK_STATUS_INFEASIBLE) return 16;
    if (dk_last_error_message() == NULL) return 17;

    dk_problem_free(p);
    printf("ok\n");
    return 0;
}
