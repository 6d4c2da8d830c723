#include "duality/cli.hpp"

int main(int argc, char** argv) { return duality::cli::run(argc, argv); }
