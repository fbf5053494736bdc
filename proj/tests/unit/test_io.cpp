#include "doctest.h"
#include "fixtures.hpp"
#include "nsmc/io.hpp"

#include <filesystem>
#include <fstream>
#include <cstring>
#include <sstream>

using namespace nsmc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nsmc_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("NSMC1 round trip is bitwise") {
  const auto dir = scratch("nsmc1");
  FieldStack s{2, 3, 4, {}};
  for (int k = 0; k < 24; ++k) s.data.push_back(std::nextafter(k * 0.1, 1e9) / 3.0);
  s.data[5] = -0.0;
  write_nsmc1(dir / "a.nsmc", s);
  const FieldStack r = read_nsmc1(dir / "a.nsmc");
  CHECK(r.count == 2);
  CHECK(r.rows == 3);
  CHECK(r.cols == 4);
  CHECK(std::memcmp(r.data.data(), s.data.data(), 24 * sizeof(double)) == 0);
  CHECK(fs::file_size(dir / "a.nsmc") == 6 + 24 + 24 * 8);
}

TEST_CASE("NSMC1 header layout") {
  const auto dir = scratch("header");
  write_nsmc1(dir / "b.nsmc", FieldStack{1, 1, 2, {1.0, 2.0}});
  std::ifstream is(dir / "b.nsmc", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), {});
  REQUIRE(bytes.size() == 46);
  CHECK(std::string(bytes.begin(), bytes.begin() + 5) == "NSMC1");
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);   // count, little endian
  CHECK(bytes[14] == 1);  // rows
  CHECK(bytes[22] == 2);  // cols
  double one = 0.0;
  std::memcpy(&one, bytes.data() + 30, 8);
  CHECK(one == 1.0);
}

TEST_CASE("NSMC1 rejects corrupt files") {
  const auto dir = scratch("corrupt");
  {
    std::ofstream os(dir / "bad.nsmc", std::ios::binary);
    os << "NOPE!!";
  }
  CHECK_THROWS_AS(read_nsmc1(dir / "bad.nsmc"), std::runtime_error);
  write_nsmc1(dir / "t.nsmc", FieldStack{1, 2, 2, {1, 2, 3, 4}});
  fs::resize_file(dir / "t.nsmc", fs::file_size(dir / "t.nsmc") - 8);
  CHECK_THROWS_AS(read_nsmc1(dir / "t.nsmc"), std::runtime_error);
  CHECK_THROWS_AS(read_nsmc1(dir / "missing.nsmc"), std::runtime_error);
  CHECK_THROWS_AS(write_nsmc1(dir / "x.nsmc", FieldStack{1, 2, 2, {1.0}}), std::runtime_error);
}

TEST_CASE("state and adjoint dumps reload bitwise") {
  fixture::SmallProblem pb;
  const auto& g = *pb.grid;
  const auto rec = eval_J(pb.grid, pb.params, pb.data, pb.reference);
  const auto dir = scratch("fields");
  write_fields(dir, "state", g, rec.state.y, rec.state.p);
  write_fields(dir, "adjoint", g, rec.adjoint.phi, rec.adjoint.pi);
  const auto y = read_velocity(dir, "state", g);
  const auto phi = read_velocity(dir, "adjoint", g);
  const auto p = unstack_pressure(read_nsmc1(dir / "state_p.nsmc"));
  REQUIRE(y.size() == rec.state.y.size());
  for (std::size_t n = 0; n < y.size(); ++n) {
    CHECK(g.to_dofs(y[n]) == rec.state.y[n]);
    CHECK(g.to_dofs(phi[n]) == rec.adjoint.phi[n]);
    CHECK(p[n] == rec.state.p[n]);
  }
}

TEST_CASE("csv tables carry headers and 17 digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  IterateLog log;
  log.entries.push_back({0, 1.5, 0.25, 1.0, 1, 2, 0.0});
  std::ostringstream os;
  write_iterate_csv(os, log);
  CHECK(os.str() == "iter,J,gap,step,atoms_c1,atoms_c2,seconds\n0,1.5,0.25,1,1,2,0\n");
  GrowthReport g;
  std::ostringstream gs;
  write_growth_csv(gs, g);
  CHECK(gs.str() == "index,distance,state_dist2,dJ,max_tv\n");
}

TEST_CASE("growth json prints an undefined kappa as null") {
  GrowthReport g;
  g.seed = 4;
  const auto j = growth_json(g);
  CHECK(j.find("\"kappa\": null") != std::string::npos);
  g.kappa = 0.5;
  CHECK(growth_json(g).find("\"kappa\": 0.5") != std::string::npos);
}
