#include "filmscore/service.h"

int main(int argc, char** argv) { return filmscore::service::run_cli(argc, argv); }
