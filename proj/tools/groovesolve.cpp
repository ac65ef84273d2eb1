// Command-line front end: computes the bounded self-similar groove profile
// for surface-diffusion evolution on the half line with a contact-angle
// condition and the nonlinear no-flux condition at the wall.

#include <iostream>
#include <string>
#include <vector>

#include "groove/cli_io.hpp"

namespace {

void usage(std::ostream& os) {
    os << "usage: groovesolve <solve|sweep|compare|selftest> [options]\n"
          "  solve     --beta <rad> | --tan-beta <v>  --out <dir>  [--gamma --L --ny --T\n"
          "            --nt --tol --max-iter --mode profile|spacetime --config <file>\n"
          "            --kernel-cache <file> --quad-level <0|1>]\n"
          "  sweep     --tan-betas v1,v2,...  --out <dir>  [solver options]\n"
          "  compare   --run <dir>\n"
          "  selftest  [--kernel-cache <file>]\n"
          "environment: GROOVESOLVE_THREADS caps worker threads (0 = auto)\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage(std::cerr);
        return 1;
    }
    const std::string cmd = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    if (cmd == "solve") return groove::cli::cmd_solve(args);
    if (cmd == "sweep") return groove::cli::cmd_sweep(args);
    if (cmd == "compare") return groove::cli::cmd_compare(args);
    if (cmd == "selftest") return groove::cli::cmd_selftest(args);
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        usage(std::cout);
        return 0;
    }
    std::cerr << "unknown command: " << cmd << '\n';
    usage(std::cerr);
    return 1;
}
