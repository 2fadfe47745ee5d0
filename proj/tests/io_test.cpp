#include <gtest/gtest.h>

#include <cstdlib>
#include <limits>
#include <sstream>

#include "she/io.hpp"

using namespace she;

namespace {

LatticeField small_field() {
    LatticeField f;
    f.replicate = 3;
    f.nx = 3;
    f.x0 = -0.5;
    f.dx = 0.5;
    f.dt = 0.01;
    f.stride = 2;
    f.nu = 0.5;
    f.values = {1.0, 2.0, 3.0, 0.1, -0.2, 1e-300};
    return f;
}

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-310, 1.9523604891825572, std::numeric_limits<double>::max()})
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    EXPECT_EQ(format_double(2.0), "2");
}

TEST(Io, FormulaCsv) {
    std::ostringstream os;
    write_formula_csv(os, {{"H", 1.0, 0.5, std::nullopt, 2, 0.25, "closed", true}, {"K", 1.0, 0.0, 1.0, std::nullopt, 0.5, "quadrature", false}});
    EXPECT_EQ(os.str(),
              "formula_id,t,x,y,p,value,branch,tolerance_met\n"
              "H,1,0.5,,2,0.25,closed,true\n"
              "K,1,0,1,,0.5,quadrature,false\n");
}

TEST(Io, EstimateCsv) {
    MomentEstimate one;
    one.p = 2;
    one.t = 0.5;
    one.x = 0.0;
    one.mean = 1.5;
    one.std_error = 0.25;
    one.M = 10;
    MomentEstimate two = one;
    two.two_point = true;
    two.y = 1.0;
    std::ostringstream os;
    write_estimate_csv(os, {one, two});
    EXPECT_EQ(os.str(), "p,t,x,y,mean,stderr,M\n2,0.5,0,,1.5,0.25,10\n2,0.5,0,1,1.5,0.25,10\n");
}

TEST(Io, FieldCsvUsesStoredRowSpacing) {
    std::ostringstream os;
    write_field_csv(os, small_field());
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,x,replicate,value");
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(lines[0], "0,-0.5,3,1");
    EXPECT_EQ(lines[4], "0.02,0,3,-0.20000000000000001");
}

TEST(Io, SnapshotRoundTrip) {
    const auto f = small_field();
    std::stringstream ss;
    write_snapshot(ss, f);
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 4 + 4 + 8 + 8 + 3 * 8 + 6 * 8);
    EXPECT_EQ(bytes.substr(0, 4), "SHE1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kSnapshotVersion);
    EXPECT_EQ(bytes[5], 0);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);  // nx, little-endian

    const Snapshot s = read_snapshot(ss);
    EXPECT_EQ(s.version, kSnapshotVersion);
    EXPECT_EQ(s.nx, 3u);
    EXPECT_EQ(s.nt, 2u);
    EXPECT_EQ(s.dx, 0.5);
    EXPECT_EQ(s.dt, 0.02);
    EXPECT_EQ(s.nu, 0.5);
    EXPECT_EQ(s.values, f.values);
}

TEST(Io, SnapshotRejectsBadInput) {
    std::istringstream bad_magic(std::string("SHE2") + std::string(60, '\0'));
    EXPECT_THROW(read_snapshot(bad_magic), Error);

    std::stringstream ss;
    write_snapshot(ss, small_field());
    std::string bytes = ss.str();
    std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(read_snapshot(truncated), Error);

    bytes[4] = 9;
    std::istringstream wrong_version(bytes);
    EXPECT_THROW(read_snapshot(wrong_version), Error);
}
