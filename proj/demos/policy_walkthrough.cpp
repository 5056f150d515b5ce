// Walks one insurer through the solvency decision: solve the free-boundary
// problem, check the ruin constraint at the unconstrained barrier, and raise
// the barrier if the constraint fails.

#include <cstdio>

#include "divbar/divbar.hpp"

int main() {
    using namespace divbar;

    ModelParams p{/*mu=*/2.0, /*lambda=*/3.0, /*sigma=*/std::sqrt(50.0),
                  /*c=*/0.05, /*T=*/50.0, /*epsilon=*/0.3};
    validate(p);

    HjbSolution sol = solve_hjb(p);
    std::printf("regime            %s\n", to_string(sol.regime));
    std::printf("unconstrained b0  %.6f\n", sol.b0);
    std::printf("switch level m    %.6f  (full retention above this reserve)\n", sol.m);
    std::printf("A*(0) = %.4f   A*(m) = %.4f   A*(b0) = %.4f\n", control_A(sol, 0.0),
                control_A(sol, sol.m), control_A(sol, sol.b0));

    PdeGrid grid;
    PolicyDecision dec = decide_policy(p, grid);
    std::printf("\nruin constraint: P[ruin by T=%g] <= %g starting from the barrier\n", p.T,
                p.epsilon);
    std::printf("decision          %s\n", dec.constrained ? "constrained (b*)" : "b0 suffices");
    std::printf("chosen barrier    %.6f\n", dec.chosen_barrier);
    std::printf("attained ruin     %.6f\n", dec.attained_ruin_prob);

    std::printf("\n        x       V(x)      A*(x)\n");
    for (int i = 0; i <= 8; ++i) {
        double x = dec.chosen_barrier * i / 8.0;
        std::printf("  %7.3f  %9.4f  %9.6f\n", x, dec.value_at(x), dec.control_at(x));
    }
    return 0;
}
