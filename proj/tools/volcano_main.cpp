#include "volcano/cli.hpp"

int main(int argc, char** argv) {
    return volcano::run_cli(argc, argv);
}
