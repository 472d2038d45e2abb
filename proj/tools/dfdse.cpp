#include "dfdse/cli.hpp"

int main(int argc, char** argv) { return dfdse::cli_main(argc, argv); }
