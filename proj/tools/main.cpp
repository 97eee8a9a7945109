#include "gwas/cli.hpp"

int main(int argc, char** argv) { return gwas::cli::main(argc, argv); }
