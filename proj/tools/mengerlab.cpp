#include "mengerlab/cli.hpp"

int main(int argc, char** argv) { return mengerlab::cli::run(argc, argv); }
