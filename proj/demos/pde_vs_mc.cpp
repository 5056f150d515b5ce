// Cross-validates the two ruin-probability solvers: the Crank-Nicolson PDE
// and the path simulator, at a few starting reserves.

#include <cstdio>

#include "divbar/divbar.hpp"

int main() {
    using namespace divbar;

    ModelParams p{2.0, 3.0, std::sqrt(50.0), 0.05, 50.0, 0.3};
    validate(p);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    double b = sol.b0;

    SurvivalField field = solve_survival_pde(p, A, b, p.T);
    std::printf("PDE grid: ny=%d nt=%d, barrier b=%.4f, horizon T=%g\n", field.ny, field.nt,
                b, p.T);

    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 0.01;
    cfg.seed = 42;

    std::printf("\n       x    psi_pde     psi_mc     stderr       gap\n");
    for (double frac : {0.25, 0.5, 1.0}) {
        double x = frac * b;
        double pde = field.ruin_at(x);
        PathBatch mc = estimate_ruin_prob(p, A, b, x, cfg);
        std::printf("  %6.2f   %8.5f   %8.5f   %8.5f  %+8.5f\n", x, pde, mc.ruin_prob,
                    mc.ruin_stderr, mc.ruin_prob - pde);
    }
    std::printf("\ngaps should sit within ~3 standard errors of zero\n");
    return 0;
}
