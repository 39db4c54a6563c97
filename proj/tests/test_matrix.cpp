#include <doctest.h>

#include "hbop/matrix.hpp"

using namespace hbop;

TEST_CASE("jacobi eigenvalues of a 2x2") {
  Matrix m(2, 2);
  m.at(0, 0) = 2.0;
  m.at(0, 1) = 1.0;
  m.at(1, 0) = 1.0;
  m.at(1, 1) = 2.0;
  std::vector<double> eig = symmetric_eigenvalues(m);
  CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi leaves a diagonal matrix alone") {
  Matrix m(3, 3);
  m.at(0, 0) = -4.0;
  m.at(1, 1) = 0.5;
  m.at(2, 2) = 7.0;
  std::vector<double> eig = symmetric_eigenvalues(m);
  CHECK(eig[0] == doctest::Approx(-4.0));
  CHECK(eig[1] == doctest::Approx(0.5));
  CHECK(eig[2] == doctest::Approx(7.0));
}

TEST_CASE("jacobi matches a reference 5x5 decomposition") {
  const double rows[5][5] = {
      {0.30471707975443135, -1.1710818065514068, 0.814924585334643,
       0.04063612675398781, -1.0679487760995485},
      {-1.1710818065514068, 0.12784040316728537, 0.23077467154268305,
       0.17597481328910503, -0.7669867359887608},
      {0.814924585334643, 0.23077467154268305, 0.06603069756121605,
       0.08417930306951699, 0.8450253404630379},
      {0.04063612675398781, 0.17597481328910503, 0.08417930306951699,
       0.8784503013072725, -0.10222769652752753},
      {-1.0679487760995485, -0.7669867359887608, 0.8450253404630379,
       -0.10222769652752753, -0.4283278221631072}};
  const double expected[5] = {-2.5099572299312056, 0.20132758977347837,
                              0.7340138443332933, 0.9705375517511567,
                              1.5527889037003761};
  Matrix m(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) m.at(i, j) = rows[i][j];
  std::vector<double> eig = symmetric_eigenvalues(m);
  REQUIRE(eig.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(eig[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("asymmetry measure") {
  Matrix m(2, 2);
  m.at(0, 1) = 0.25;
  m.at(1, 0) = 0.5;
  CHECK(m.max_asymmetry() == doctest::Approx(0.25));
}
