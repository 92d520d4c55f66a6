#include "confsym/cli/app.hpp"

int main(int argc, char** argv) { return confsym::cli::run(argc, argv); }
