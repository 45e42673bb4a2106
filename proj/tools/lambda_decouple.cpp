// lambda-decouple: command-line front end
//
//   lambda-decouple verify-group | dephasing-curve | quiet-regime | oracle-check | schedule
//       [--config FILE] [--out PATH] [--set key=value]... [--threads K]

#include <iostream>

#include "lambda_decouple/commands.hpp"

int main(int argc, char** argv) {
    return lambda_decouple::run_cli(argc, argv, std::cout, std::cerr);
}
