#include "experiment.hpp"

int main(int argc, char** argv) { return alchemy::cli::main_entry(argc, argv); }
