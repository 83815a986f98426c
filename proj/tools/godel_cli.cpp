#include "godel/cli.hpp"

int main(int argc, char** argv) { return godel::run_cli(argc, argv); }
