// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "cpbsp/image_io.hpp"
#include "test_support.hpp"

using cpbsp::Frame;
using cpbsp::ImageMode;
using testutil::TempDir;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("gray round-trips are bit-exact for every format", "[image_io]") {
    TempDir dir;
    std::mt19937 rng(11);
    const Frame f = testutil::random_gray(16, 16, rng);
    for (const char* name : {"f.pgm", "f.png"}) {
        const auto path = dir.path / name;
        cpbsp::save_image(f, path, ImageMode::Gray);
        const Frame back = cpbsp::load_image(path);
        CHECK(back == f);
    }
}

TEST_CASE("color round-trips are bit-exact for every format", "[image_io]") {
    TempDir dir;
    std::mt19937 rng(12);
    const Frame f = testutil::random_color(13, 9, rng);
    for (const char* name : {"f.ppm", "f.png"}) {
        const auto path = dir.path / name;
        cpbsp::save_image(f, path, ImageMode::Color);
        const Frame back = cpbsp::load_image(path);
        CHECK(back == f);
    }
}

TEST_CASE("saving a color frame in gray mode stores the derived grayscale", "[image_io]") {
    TempDir dir;
    std::mt19937 rng(13);
    const Frame f = testutil::random_color(8, 8, rng);
    const auto path = dir.path / "gray.pgm";
    cpbsp::save_image(f, path, ImageMode::Gray);
    const Frame back = cpbsp::load_image(path);
    CHECK_FALSE(back.has_color());
    CHECK(back.gray == f.gray);
}

TEST_CASE("writes to an unwritable path fail with WriteError", "[image_io]") {
    const Frame f(4, 4);
    CHECK_THROWS_AS(cpbsp::save_image(f, "/nonexistent_dir_xyz/out.pgm", ImageMode::Gray),
                    cpbsp::WriteError);
}

TEST_CASE("mode/extension mismatches are rejected", "[image_io]") {
    const Frame gray_only(4, 4);
    CHECK_THROWS_AS(cpbsp::save_image(gray_only, "/tmp/x.ppm", ImageMode::Color), cpbsp::ModeError);
    TempDir dir;
    std::mt19937 rng(14);
    const Frame color = testutil::random_color(4, 4, rng);
    CHECK_THROWS_AS(cpbsp::save_image(color, dir.path / "x.pgm", ImageMode::Color),
                    cpbsp::ModeError);
}

TEST_CASE("load_sequence returns sorted, indexed frames with color preserved", "[image_io]") {
    TempDir dir;
    std::mt19937 rng(15);
    std::vector<Frame> originals;
    for (int i = 0; i < 20; ++i) {
        Frame f = testutil::random_color(64, 48, rng);
        char name[32];
        std::snprintf(name, sizeof(name), "in%03d.png", i);
        cpbsp::save_image(f, dir.path / name, ImageMode::Color);
        originals.push_back(std::move(f));
    }
    write_bytes(dir.path / "notes.txt", "not an image");

    const auto seq = cpbsp::load_sequence(dir.path, "in*.png");
    REQUIRE(seq.size() == 20);
    for (int i = 0; i < 20; ++i) {
        CHECK(seq[static_cast<std::size_t>(i)].index == i);
        CHECK(seq[static_cast<std::size_t>(i)].has_color());
        CHECK(seq[static_cast<std::size_t>(i)] == originals[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("load_sequence with no matches reports NoFrames", "[image_io]") {
    TempDir dir;
    CHECK_THROWS_AS(cpbsp::load_sequence(dir.path, "in*"), cpbsp::NoFrames);
}

TEST_CASE("load_sequence rejects mixed dimensions", "[image_io]") {
    TempDir dir;
    cpbsp::save_image(Frame(32, 24), dir.path / "in000.pgm", ImageMode::Gray);
    cpbsp::save_image(Frame(16, 12), dir.path / "in001.pgm", ImageMode::Gray);
    CHECK_THROWS_AS(cpbsp::load_sequence(dir.path, "in*"), cpbsp::DimensionMismatch);
}

TEST_CASE("undecodable files are rejected by name", "[image_io]") {
    TempDir dir;
    write_bytes(dir.path / "in000.pgm", "garbage that is not an image");
    CHECK_THROWS_AS(cpbsp::load_sequence(dir.path, "in*"), cpbsp::DecodeError);

    write_bytes(dir.path / "photo.jpg", std::string("\xff\xd8\xff\xe0 fake jpeg", 14));
    CHECK_THROWS_AS(cpbsp::load_image(dir.path / "photo.jpg"), cpbsp::DecodeError);
}

TEST_CASE("16-bit PNM input is rejected", "[image_io]") {
    TempDir dir;
    write_bytes(dir.path / "deep.pgm", "P5\n2 2\n65535\n" + std::string(8, '\0'));
    CHECK_THROWS_AS(cpbsp::load_image(dir.path / "deep.pgm"), cpbsp::DecodeError);
}

TEST_CASE("PNM comments and whitespace are tolerated", "[image_io]") {
    TempDir dir;
    write_bytes(dir.path / "c.pgm", "P5\n# a comment\n 2 # another\n2\n255\n\x01\x02\x03\x04");
    const Frame f = cpbsp::load_image(dir.path / "c.pgm");
    REQUIRE(f.width == 2);
    REQUIRE(f.height == 2);
    CHECK(f.at(0, 0) == 1);
    CHECK(f.at(1, 1) == 4);
}
