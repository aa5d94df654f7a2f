#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stx/coarse.hpp"
#include "stx/compose.hpp"
#include "stx/decompose.hpp"
#include "stx/epsilon.hpp"
#include "stx/fixtures.hpp"
#include "stx/info.hpp"
#include "stx/json_io.hpp"
#include "stx/process.hpp"
#include "stx/transducer.hpp"

TEST_CASE("headers compile and a trivial machine validates") {
  const stx::Transducer id = stx::fixtures::identity();
  CHECK(stx::validate_transducer(id).empty());
}
