#include "identlink/cli.hpp"

int main(int argc, char** argv) {
  return identlink::cli_dispatch({argv + 1, argv + argc});
}
