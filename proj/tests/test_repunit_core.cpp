#include <catch2/catch_amalgamated.hpp>

#include "repunit/repunit.hpp"

using namespace repunit;

TEST_CASE("repunit_value frozen cases") {
  CHECK(repunit_value(1) == 1);
  CHECK(repunit_value(2) == 11);
  CHECK(repunit_value(5) == 11111);
  CHECK_THROWS_AS(repunit_value(0), DomainError);
}

TEST_CASE("absurd indices are refused instead of exhausting memory") {
  CHECK_THROWS_AS(repunit_value(UINT64_MAX / 2), BoundExceeded);
  CHECK_THROWS_AS(initial_value(UINT64_MAX, 1), BoundExceeded);
  CHECK_THROWS_AS(initial_value(1, UINT64_MAX), BoundExceeded);
  CHECK_THROWS_AS(initial_value(1ULL << 40, 1ULL << 40), BoundExceeded);
}

TEST_CASE("repunit rendering is all ones") {
  for (uint64_t n = 1; n <= 2000; ++n) {
    const std::string s = repunit_value(n).get_str();
    REQUIRE(s.size() == n);
    REQUIRE(s.find_first_not_of('1') == std::string::npos);
  }
}

TEST_CASE("initial_value frozen cases") {
  CHECK(initial_value(3, 1) == 1010101);
  CHECK(initial_value(0, 7) == 1);
  CHECK(initial_value(1, 3) == 10001);
}

TEST_CASE("initial_value satisfies the quotient identity") {
  // E(n,k) * R(k+1) = R((k+1)(n+1))
  for (uint64_t n = 0; n <= 50; ++n)
    for (uint64_t k = 0; k <= 50; ++k)
      REQUIRE(initial_value(n, k) * repunit_value(k + 1) == repunit_value((k + 1) * (n + 1)));
}

TEST_CASE("repunits are the k=0 initial numbers") {
  for (uint64_t n = 1; n <= 200; ++n) REQUIRE(initial_value(n - 1, 0) == repunit_value(n));
}

TEST_CASE("initial rendering is the padded palindrome") {
  // block "1 0^k" repeated n times, closing 1
  const DigitRecord rec{"100", 4, "1"};
  CHECK(render_digit_record(rec) == initial_value(4, 2).get_str());
  CHECK(initial_value(2, 3).get_str() == "100010001");
  for (uint64_t n = 0; n <= 12; ++n)
    for (uint64_t k = 0; k <= 12; ++k) {
      const DigitRecord pattern{"1" + std::string(k, '0'), n, "1"};
      REQUIRE(render_digit_record(pattern) == initial_value(n, k).get_str());
    }
}

TEST_CASE("digit record rendering") {
  CHECK(render_digit_record({"10", 3, "1"}) == "1010101");
  CHECK(render_digit_record({"10", 0, "1"}) == "1");
  CHECK(render_digit_record({"1", 4, ""}) == "1111");
  CHECK_THROWS_AS(render_digit_record({"10", 0, ""}), DomainError);  // the empty record
  CHECK_THROWS_AS(render_digit_record({"1a", 2, ""}), DomainError);
}

TEST_CASE("repunit_plus_value") {
  CHECK(repunit_plus_value(1) == 1);
  CHECK(repunit_plus_value(3) == 91);
  CHECK(repunit_plus_value(5) == 9091);
  CHECK(repunit_plus_value(5) * 11 == pow10(5) + 1);
  CHECK_THROWS_AS(repunit_plus_value(4), DomainError);
  CHECK_THROWS_AS(repunit_plus_value(0), DomainError);
}

TEST_CASE("cofactor frozen cases") {
  CHECK(cofactor(6, 2) == 10101);
  CHECK(cofactor(5, 5) == 1);
  CHECK(cofactor(6, 3) == 1001);
  CHECK_THROWS_AS(cofactor(6, 4), DomainError);
  CHECK_THROWS_AS(cofactor(6, 0), DomainError);
}

TEST_CASE("cofactor reassembles the larger repunit") {
  for (uint64_t a = 1; a <= 500; ++a)
    for (uint64_t d = 1; d <= a; ++d) {
      if (a % d != 0) continue;
      REQUIRE(cofactor(a, d) * repunit_value(d) == repunit_value(a));
    }
}

TEST_CASE("decimal_digits is exact") {
  CHECK(decimal_digits(Natural(0)) == 1);
  CHECK(decimal_digits(Natural(9)) == 1);
  CHECK(decimal_digits(Natural(10)) == 2);
  CHECK(decimal_digits(Natural(999)) == 3);
  CHECK(decimal_digits(Natural(1000)) == 4);
  for (uint64_t n = 1; n <= 300; ++n) REQUIRE(decimal_digits(repunit_value(n)) == n);
}

TEST_CASE("truncated rendering keeps head, tail and digit count") {
  CHECK(truncated_decimal(Natural(12345), 64) == "12345");
  const Natural big = repunit_value(127 * 127);
  const std::string s = truncated_decimal(big, 64);
  CHECK(s == "11111111...11111111[16129 digits]");
  // threshold respected exactly
  const Natural r70 = repunit_value(70);
  CHECK(truncated_decimal(r70, 70) == r70.get_str());
  CHECK(truncated_decimal(r70, 69) == "11111111...11111111[70 digits]");
}

TEST_CASE("subject descriptors materialize and label") {
  CHECK(Subject::repunit(7).value() == repunit_value(7));
  CHECK(Subject::initial(3, 1).value() == 1010101);
  CHECK(Subject::repunit_plus(5).value() == 9091);
  CHECK(Subject::repunit(7).label() == "R(7)");
  CHECK(Subject::initial(3, 1).label() == "E(3,1)");
  CHECK(Subject::repunit_plus(5).label() == "Rplus(5)");
}
