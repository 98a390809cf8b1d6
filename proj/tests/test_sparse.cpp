#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "gmrf/matrix_market.hpp"
#include "gmrf/sparse.hpp"
#include "support/dense.hpp"

using idx = gmrf::index;
using gmrf::SymmetricSparseMatrix;
using gmrf::Triplet;

TEST_CASE("add_scaled identity case") {
    auto i2 = gmrf::identity_matrix(2);
    auto r = gmrf::add_scaled(i2, i2, 1.0, 1.0);
    CHECK(r.get(0, 0) == 2.0);
    CHECK(r.get(1, 1) == 2.0);
    CHECK(r.get(1, 0) == 0.0);
    CHECK(r.nnz() == 2);
}

TEST_CASE("add_scaled hand checkable 2x2") {
    auto d = gmrf::diagonal_matrix({1.0, 2.0});
    auto off = gmrf::symmetric_from_triplets(2, {{1, 0, 1.0}});
    auto r = gmrf::add_scaled(d, off, 2.0, 1.0);
    CHECK(r.get(0, 0) == 2.0);
    CHECK(r.get(1, 0) == 1.0);
    CHECK(r.get(0, 1) == 1.0);
    CHECK(r.get(1, 1) == 4.0);
}

TEST_CASE("add_scaled matches dense arithmetic on random union patterns") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto a = oracle::random_spd(17, 0.3, seed);
        auto b = oracle::random_spd(17, 0.2, seed + 100);
        auto r = gmrf::add_scaled(a, b, 1.7, -0.4);
        auto expected = oracle::add(oracle::to_dense(a), oracle::to_dense(b), 1.7, -0.4);
        auto got = oracle::to_dense(r);
        for (idx i = 0; i < 17; ++i)
            for (idx j = 0; j < 17; ++j)
                CHECK(got.at(i, j) == Catch::Approx(expected.at(i, j)).margin(1e-12));
    }
}

TEST_CASE("add_scaled keeps cancelled entries in the pattern") {
    auto a = oracle::random_spd(9, 0.4, 5);
    auto r = gmrf::add_scaled(a, a, 1.0, -1.0);
    CHECK(r.pattern == a.pattern);
    for (double v : r.values) CHECK(v == 0.0);
}

TEST_CASE("add_scaled rejects mismatched dimensions") {
    CHECK_THROWS_AS(gmrf::add_scaled(gmrf::identity_matrix(2), gmrf::identity_matrix(3), 1, 1),
                    gmrf::DimensionMismatch);
}

TEST_CASE("kron block diagonal and diagonal cases") {
    auto a = gmrf::symmetric_from_triplets(2, {{0, 0, 1.0}, {1, 0, 0.5}, {1, 1, 2.0}});
    auto r = gmrf::kron(gmrf::identity_matrix(2), a);
    CHECK(r.n() == 4);
    CHECK(r.get(1, 0) == 0.5);
    CHECK(r.get(3, 2) == 0.5);
    CHECK(r.get(2, 0) == 0.0);
    CHECK(r.get(2, 1) == 0.0);

    auto d = gmrf::kron(gmrf::diagonal_matrix({2.0, 3.0}), gmrf::diagonal_matrix({5.0}));
    CHECK(d.get(0, 0) == 10.0);
    CHECK(d.get(1, 1) == 15.0);
}

TEST_CASE("kron of random SPD matrices matches the dense Kronecker oracle") {
    auto a = oracle::random_spd(4, 0.6, 21);
    auto b = oracle::random_spd(4, 0.6, 22);
    auto r = gmrf::kron(a, b);
    auto expected = oracle::kron(oracle::to_dense(a), oracle::to_dense(b));
    auto got = oracle::to_dense(r);
    REQUIRE(r.n() == 16);
    for (idx i = 0; i < 16; ++i)
        for (idx j = 0; j < 16; ++j)
            CHECK(got.at(i, j) == Catch::Approx(expected.at(i, j)).margin(1e-13));
}

TEST_CASE("kron pattern is associative") {
    auto a = oracle::random_spd(3, 0.5, 31);
    auto b = oracle::random_spd(2, 0.8, 32);
    auto c = oracle::random_spd(3, 0.4, 33);
    auto left = gmrf::kron(gmrf::kron(a, b), c);
    auto right = gmrf::kron(a, gmrf::kron(b, c));
    CHECK(left.pattern == right.pattern);
}

TEST_CASE("scaling commutes with kron") {
    auto a = oracle::random_spd(4, 0.5, 41);
    auto b = oracle::random_spd(3, 0.5, 42);
    auto left = gmrf::kron(gmrf::scale(a, 2.5), b);
    auto right = gmrf::scale(gmrf::kron(a, b), 2.5);
    REQUIRE(left.pattern == right.pattern);
    for (std::size_t k = 0; k < left.values.size(); ++k)
        CHECK(left.values[k] == Catch::Approx(right.values[k]).margin(1e-12));
}

TEST_CASE("normal_product trivial cases") {
    auto i3 = gmrf::projection_from_triplets(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    auto r = gmrf::normal_product(i3, 4.0);
    CHECK(r.get(0, 0) == 4.0);
    CHECK(r.get(1, 1) == 4.0);
    CHECK(r.get(2, 2) == 4.0);
    CHECK(r.nnz() == 3);

    auto row = gmrf::projection_from_triplets(1, 2, {{0, 0, 1}, {0, 1, 1}});
    auto s = gmrf::normal_product(row, 1.0);
    CHECK(s.get(0, 0) == 1.0);
    CHECK(s.get(1, 0) == 1.0);
    CHECK(s.get(1, 1) == 1.0);
}

TEST_CASE("normal_product matches the dense A'A oracle") {
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
    std::vector<Triplet> trips;
    for (idx r = 0; r < 6; ++r)
        for (idx c = 0; c < 10; ++c)
            if (u(gen) < 0.4) trips.push_back({r, c, v(gen)});
    auto a = gmrf::projection_from_triplets(6, 10, trips);
    auto da = oracle::to_dense(a);
    auto expected = oracle::matmul(oracle::transpose(da), da);
    auto got = oracle::to_dense(gmrf::normal_product(a, 1.0));
    for (idx i = 0; i < 10; ++i)
        for (idx j = 0; j < 10; ++j)
            CHECK(got.at(i, j) == Catch::Approx(expected.at(i, j)).margin(1e-13));
}

TEST_CASE("matvec expands the stored triangle") {
    auto q = gmrf::symmetric_from_triplets(2, {{0, 0, 2.0}, {1, 0, 1.0}, {1, 1, 3.0}});
    auto y = gmrf::matvec(q, {1.0, 1.0});
    CHECK(y[0] == 3.0);
    CHECK(y[1] == 4.0);

    auto i5 = gmrf::identity_matrix(5);
    auto x = oracle::random_vector(5, 81);
    CHECK(gmrf::matvec(i5, x) == x);
}

TEST_CASE("matvec matches the dense oracle on a random 50x50") {
    auto q = oracle::random_spd(50, 0.15, 91);
    auto x = oracle::random_vector(50, 92);
    auto y = gmrf::matvec(q, x);
    auto d = oracle::to_dense(q);
    for (idx i = 0; i < 50; ++i) {
        double e = 0.0;
        for (idx j = 0; j < 50; ++j) e += d.at(i, j) * x[j];
        CHECK(y[i] == Catch::Approx(e).margin(1e-12));
    }
}

TEST_CASE("symmetry holds through reconstruction") {
    auto q = oracle::random_spd(12, 0.35, 101);
    auto d = oracle::to_dense(q);
    for (idx i = 0; i < q.n(); ++i)
        for (idx j = 0; j < q.n(); ++j) CHECK(d.at(i, j) == d.at(j, i));
}

TEST_CASE("matrix market round trip is exact") {
    auto q = oracle::random_spd(14, 0.3, 111);
    std::stringstream ss;
    gmrf::write_matrix_market(ss, q);
    auto back = gmrf::read_matrix_market(ss);
    REQUIRE(back.pattern == q.pattern);
    for (std::size_t k = 0; k < q.values.size(); ++k) CHECK(back.values[k] == q.values[k]);
}

TEST_CASE("matrix market rejects malformed input") {
    std::stringstream bad1("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0\n");
    CHECK_THROWS_AS(gmrf::read_matrix_market(bad1), gmrf::ParseError);
    std::stringstream bad2("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n");
    CHECK_THROWS_AS(gmrf::read_matrix_market(bad2), gmrf::ParseError);
    std::stringstream bad3("%%MatrixMarket matrix coordinate real symmetric\n2 2 oops\n");
    CHECK_THROWS_AS(gmrf::read_matrix_market(bad3), gmrf::ParseError);
}

TEST_CASE("pattern validation catches broken invariants") {
    gmrf::SparsityPattern p;
    p.n = 2;
    p.col_ptr = {0, 1, 2};
    p.row_idx = {0, 0};  // row above the diagonal in column 1
    CHECK_THROWS(p.validate());
    p.row_idx = {0, 1};
    CHECK_NOTHROW(p.validate());
}
