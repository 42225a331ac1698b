#include "chase/cli_app.hpp"

int main(int argc, char** argv) { return chase::cli_main(argc, argv); }
