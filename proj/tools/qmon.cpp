#include "qmon/cli.hpp"

int main(int argc, char** argv) { return qmon::cli_main(argc, argv); }
