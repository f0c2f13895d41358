#include "orbiform/cli.hpp"

int main(int argc, char** argv) { return orbiform::cli_run(argc, argv); }
