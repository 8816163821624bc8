#include "popov/cli.hpp"

int main(int argc, char** argv) { return popov::cli::run(argc, argv); }
