#include "gazescore/cli.hpp"

int main(int argc, char** argv) { return gazescore::cli::run(argc, argv); }
