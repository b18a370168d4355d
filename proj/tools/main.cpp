#include "udd/cli.hpp"

int main(int argc, char** argv) {
    return udd::cli_main(argc, argv);
}
