#include "pedsched/cli.hpp"

int main(int argc, char** argv) { return pedsched::cli::run(argc, argv); }
