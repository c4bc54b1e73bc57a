#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cmawiz/baselines.hpp"
#include "cmawiz/error.hpp"
#include "cmawiz/run_store.hpp"

namespace cmawiz {
namespace {

namespace fs = std::filesystem;

class RunStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cmawiz_store_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    path_ = dir_ / "runs" / "store.jsonl";
  }
  void TearDown() override { fs::remove_all(dir_); }

  static RunRecord record(std::uint64_t seed) {
    InstanceSpec inst;
    inst.function = FunctionId::Griewank;
    inst.dimension = 3;
    inst.budget = 20;
    inst.rotation_seed = 4;
    auto r = run_baseline("random-search", inst, seed);
    r.suite = "YABBOB";
    return r;
  }

  std::string text() const {
    std::ifstream in(path_, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  fs::path dir_;
  fs::path path_;
};

TEST_F(RunStoreTest, CreatesWithHeaderAndAppends) {
  RunStore store(path_);
  EXPECT_TRUE(store.records().empty());
  EXPECT_TRUE(store.append(record(1)));
  EXPECT_TRUE(store.append(record(2)));
  EXPECT_TRUE(store.contains(key_of(record(1))));

  RunStore reopened(path_);
  ASSERT_EQ(reopened.records().size(), 2u);
  EXPECT_EQ(reopened.records()[0], record(1));
  EXPECT_EQ(text().substr(0, text().find('\n')), R"({"schema":"cmawizard.runs","version":1})");
}

TEST_F(RunStoreTest, AppendIsIdempotent) {
  RunStore store(path_);
  EXPECT_TRUE(store.append(record(1)));
  const std::string once = text();
  EXPECT_FALSE(store.append(record(1)));
  EXPECT_EQ(text(), once);
}

TEST_F(RunStoreTest, DropsInterruptedTrailingLine) {
  {
    RunStore store(path_);
    store.append(record(1));
    store.append(record(2));
  }
  const std::string full = text();
  {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out << full.substr(0, full.size() - 17);
  }
  RunStore store(path_);
  ASSERT_EQ(store.records().size(), 1u);
  EXPECT_TRUE(store.append(record(2)));
  EXPECT_EQ(text(), full);
}

TEST_F(RunStoreTest, RejectsForeignFiles) {
  fs::create_directories(path_.parent_path());
  {
    std::ofstream out(path_);
    out << R"({"schema":"cmawizard.elites","version":1})" << "\n";
  }
  EXPECT_THROW(RunStore{path_}, Error);
}

}  // namespace
}  // namespace cmawiz
