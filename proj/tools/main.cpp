#include "freeprob/harness.hpp"

int main(int argc, char** argv) { return freeprob::cli_main(argc, argv); }
