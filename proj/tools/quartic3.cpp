#include "q3/cli.hpp"

int main(int argc, char** argv) { return q3::cli::run(argc, argv); }
