#include "erlsim/cli.hpp"

int main(int argc, char** argv) { return erl::cli::main(argc, argv); }
