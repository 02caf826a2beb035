#include <stdio.h>
#include <assert.h>
#include "irlw.h"

int main(void) {
    double sv[2] = {1.0, 1.0};
    IrlwProblem *problem = NULL;
    assert(irlw_problem_diagonal(sv, 2, NULL, &problem) == IRLW_STATUS_OK);

    IrlwSolverOptions options;
    assert(irlw_solver_options_default(&options) == IRLW_STATUS_OK);
    options.rho_sq = 0.125;

    IrlwTrace *trace = NULL;
    assert(irlw_solve(problem, &options, NULL, &trace) == IRLW_STATUS_OK);
    size_t len = irlw_trace_len(trace);
    IrlwTraceRow row;
    assert(irlw_trace_row(trace, len - 1, &row) == IRLW_STATUS_OK);
    printf("iterations=%zu final_gamma=%.3e status=%d\n", len, row.gamma, irlw_trace_status(trace));
    assert(row.gamma <= 1e-9);

    irlw_trace_free(trace);
    irlw_problem_free(problem);
    printf("ffi smoke ok: version %s\n", irlw_version());
    return 0;
}
