#include "qforest/runner.hpp"

int main(int argc, char** argv) { return qforest::runner::cli_main(argc, argv); }
