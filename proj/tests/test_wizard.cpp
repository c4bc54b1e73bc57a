#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "cmawiz/error.hpp"
#include "cmawiz/wizard.hpp"

namespace cmawiz {
namespace {

std::string expected_slot(bool bounded, long budget, int dim, int workers) {
  if (bounded) return "CMAbounded";
  if (budget < 50) return dim <= 15 ? "CMAtuning" : "CMAsmall";
  if (workers > 20) return "CMApara";
  return "CMAstd";
}

TEST(Select, BoundaryExamples) {
  EXPECT_EQ(meta_cma_select({300, 40, 1, true}), "CMAbounded");
  EXPECT_EQ(meta_cma_select({49, 15, 1, false}), "CMAtuning");
  EXPECT_EQ(meta_cma_select({49, 16, 1, false}), "CMAsmall");
  EXPECT_EQ(meta_cma_select({50, 10, 21, false}), "CMApara");
  EXPECT_EQ(meta_cma_select({50, 10, 20, false}), "CMAstd");
}

TEST(Select, BudgetBelowFiftyIgnoresWorkers) {
  EXPECT_EQ(meta_cma_select({49, 10, 100, false}), "CMAtuning");
  EXPECT_EQ(meta_cma_select({10, 400, 100, false}), "CMAsmall");
}

TEST(Select, ExhaustiveGrid) {
  for (bool bounded : {false, true})
    for (long budget : {1L, 49L, 50L, 51L, 100000L})
      for (int dim : {1, 15, 16, 3000})
        for (int workers : {1, 20, 21, 100})
          EXPECT_EQ(meta_cma_select({budget, dim, workers, bounded}), expected_slot(bounded, budget, dim, workers));
}

TEST(Registry, DefaultsAreTheTunedTable) {
  const auto r = ConfigRegistry::defaults();
  EXPECT_EQ(r.at("CMAstd"), CmaConfig(0.3607, 3, false, false));
  EXPECT_EQ(r.at("CMAsmall"), CmaConfig(0.4151, 9, false, false));
  EXPECT_EQ(r.at("CMAtuning"), CmaConfig(0.4847, 1, true, false));
  EXPECT_EQ(r.at("CMApara"), CmaConfig(0.8905, 8, true, true));
  EXPECT_EQ(r.at("CMAbounded"), CmaConfig(1.5884, 1, true, true));
  EXPECT_THROW(r.at("CMAhuge"), Error);
}

TEST(Registry, SerializedTextIsExact) {
  const std::string text = serialize_registry(ConfigRegistry::defaults());
  EXPECT_EQ(text,
            "# cmawizard registry v1\n"
            "\n[CMAstd]\nscale = 0.3607\npopsize_factor = 3\nelitist = false\ndiagonal = false\n"
            "\n[CMAsmall]\nscale = 0.4151\npopsize_factor = 9\nelitist = false\ndiagonal = false\n"
            "\n[CMAtuning]\nscale = 0.4847\npopsize_factor = 1\nelitist = true\ndiagonal = false\n"
            "\n[CMApara]\nscale = 0.8905\npopsize_factor = 8\nelitist = true\ndiagonal = true\n"
            "\n[CMAbounded]\nscale = 1.5884\npopsize_factor = 1\nelitist = true\ndiagonal = true\n");
}

TEST(Registry, RoundTrip) {
  auto r = ConfigRegistry::defaults();
  r.set("CMAsmall", CmaConfig(1.0 / 3.0, 2, true, false));
  EXPECT_EQ(parse_registry(serialize_registry(r)), r);
}

TEST(Registry, PartialOverride) {
  EXPECT_EQ(parse_registry("# cmawizard registry v1\n", true), ConfigRegistry::defaults());
  EXPECT_THROW(parse_registry("# cmawizard registry v1\n", false), Error);
  const auto r = parse_registry(
      "# cmawizard registry v1\n[CMApara]\nscale = 2.5\npopsize_factor = 4\nelitist = false\ndiagonal = true\n", true);
  EXPECT_EQ(r.at("CMApara"), CmaConfig(2.5, 4, false, true));
  EXPECT_EQ(r.at("CMAstd"), ConfigRegistry::defaults().at("CMAstd"));
}

std::string parse_error(const std::string& text) {
  try {
    parse_registry(text, true);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    return e.what();
  }
  return "";
}

TEST(Registry, ErrorsNameTheField) {
  const std::string head = "# cmawizard registry v1\n";
  const std::string tail = "popsize_factor = 3\nelitist = false\ndiagonal = false\n";
  EXPECT_NE(parse_error(head + "[CMAstd]\nscale = 0.05\n" + tail).find("CMAstd.scale"), std::string::npos);
  EXPECT_NE(parse_error(head + "[CMAstd]\nscale = abc\n" + tail).find("CMAstd.scale"), std::string::npos);
  EXPECT_NE(parse_error(head + "[CMAstd]\nscale = 1\npopsize_factor = 12\nelitist = false\ndiagonal = false\n")
                .find("CMAstd.popsize_factor"),
            std::string::npos);
  EXPECT_NE(parse_error(head + "[CMAstd]\nscale = 1\npopsize_factor = 3\nelitist = maybe\ndiagonal = false\n")
                .find("CMAstd.elitist"),
            std::string::npos);
  EXPECT_NE(parse_error(head + "[CMAstd]\nscale = 1\n" + tail + "sigma = 3\n").find("CMAstd.sigma"),
            std::string::npos);
  EXPECT_NE(parse_error(head + "[CMAmega]\nscale = 1\n" + tail).find("CMAmega"), std::string::npos);
  EXPECT_NE(parse_error(head + "[CMAstd]\n" + tail).find("CMAstd.scale"), std::string::npos);
  EXPECT_FALSE(parse_error("[CMAstd]\n").empty());
}

TEST(Registry, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "cmawiz_registry_test.registry";
  {
    std::ofstream out(path);
    out << serialize_registry(ConfigRegistry::defaults());
  }
  EXPECT_EQ(load_registry(path), ConfigRegistry::defaults());
  std::filesystem::remove(path);
  try {
    load_registry(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(WizardRun, TagsDispatchedSlot) {
  InstanceSpec inst;
  inst.function = FunctionId::Sphere;
  inst.dimension = 4;
  inst.budget = 120;
  inst.box = symmetric_box(4, 5.0);
  const auto p = ProblemDescriptor::from_instance(inst);
  const auto a = wizard_run(p, inst, ConfigRegistry::defaults(), 3);
  EXPECT_EQ(a.algorithm, "MetaCMA");
  EXPECT_EQ(a.variant, "CMAbounded");
  EXPECT_EQ(a.config, ConfigRegistry::defaults().at("CMAbounded"));
  EXPECT_EQ(a, wizard_run(p, inst, ConfigRegistry::defaults(), 3));
}

TEST(WizardRun, DescriptorMismatchRejected) {
  InstanceSpec inst;
  inst.dimension = 4;
  inst.budget = 120;
  auto p = ProblemDescriptor::from_instance(inst);
  p.fully_bounded = true;
  try {
    wizard_run(p, inst, ConfigRegistry::defaults(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
  }
}

TEST(Slots, TrainingSuites) {
  EXPECT_EQ(slot_for_suite("YABBOB"), "CMAstd");
  EXPECT_EQ(slot_for_suite("YABOUNDEDBBOB"), "CMAbounded");
  EXPECT_THROW(slot_for_suite("YAHDBBOB"), Error);
}

}  // namespace
}  // namespace cmawiz
