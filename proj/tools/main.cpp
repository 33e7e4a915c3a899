#include "adapt/cli.hpp"

int main(int argc, char** argv) { return adapt::cli_main(argc, argv); }
