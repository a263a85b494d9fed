#include "affectlex/cli.hpp"

int main(int argc, char** argv) { return affectlex::cli::run(argc, argv); }
