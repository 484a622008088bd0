#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nehs/cli.hpp"
#include "nehs/features.hpp"
#include "nehs/text_io.hpp"
#include "synthetic.hpp"

using namespace nehs;
using namespace nehs::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result nehs_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

// A small planted-sphere world written to disk, plus a rotated copy of its
// space standing in for a second language.
struct Workspace {
  fs::path dir;
  Matrix rotation;

  Workspace() {
    dir = fs::temp_directory_path() / ("nehs_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    NerWorldConfig cfg;
    cfg.dim = 16;
    cfg.entity_words = 40;
    cfg.noise_words = 15;
    cfg.outside_words = 150;
    cfg.sentences = 60;
    const auto world = make_ner_world(21, cfg);
    save_embeddings(world.space, p("src.txt"));

    std::mt19937_64 rng(5);
    rotation = random_orthogonal(16, rng);
    EmbeddingSpace rotated(16, "tgt");
    for (std::size_t i = 0; i < world.space.size(); ++i) rotated.add(world.space.token(i), rotation * world.space.vector(i));
    save_embeddings(rotated, p("tgt.txt"));

    std::ofstream dict(p("dict.tsv"));
    for (const auto& e : world.dictionary.entries) dict << to_string(e.type) << '\t' << e.text() << '\n';
    std::ofstream lex(p("lex.tsv"));
    for (const auto& t : world.space.tokens()) lex << t << '\t' << t << '\n';
    std::ofstream train(p("train.conll"));
    write_conll(world.train, train);
    std::ofstream test(p("test.conll"));
    write_conll(world.test, test);
    std::ofstream one(p("one.conll"));
    one << world.space.token(0) << "\tO\n";
    std::ofstream line(p("line.txt"));
    line << "3 3\na 0 0 0\nb 1 2 3\nc 3 6 9\n";
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string p(const std::string& name) const { return (dir / name).string(); }
  std::string read(const std::string& name) const { return io::read_file(dir / name); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("fit reports F1 1.0 on a separable fixture and is reproducible") {
    Workspace ws;
    const std::vector<std::string> args{"--out-dir", ws.dir.string(), "fit", "--embeddings", ws.p("src.txt"),
                                        "--dictionary", ws.p("dict.tsv")};
    const auto r = nehs_run(args);
    REQUIRE_MESSAGE(r.status == 0, r.err);
    const auto report = json::parse(ws.read("fit_report.json"));
    for (const auto& row : report["types"]) CHECK(row["f1"].get<double>() == 1.0);
    const std::string first = ws.read("spheres.json");
    REQUIRE(nehs_run(args).status == 0);
    CHECK(ws.read("spheres.json") == first);
    CHECK(load_spheres(ws.dir / "spheres.json").size() == 3);
  }

  TEST_CASE("missing inputs fail with the path in the message") {
    Workspace ws;
    const auto r = nehs_run({"fit", "--embeddings", ws.p("src.txt"), "--dictionary", ws.p("nope.tsv")});
    CHECK(r.status != 0);
    CHECK(r.err.find("nope.tsv") != std::string::npos);
    const auto t = nehs_run({"--out-dir", ws.dir.string(), "transfer", "--map", ws.p("none.json"), "--spheres",
                             ws.p("none.json"), "--source", ws.p("src.txt"), "--target", ws.p("tgt.txt"),
                             "--target-dictionary", ws.p("dict.tsv")});
    CHECK(t.status != 0);
  }

  TEST_CASE("align modes") {
    Workspace ws;
    const auto pro = nehs_run({"--out-dir", ws.dir.string(), "align", "--source", ws.p("src.txt"), "--target",
                               ws.p("tgt.txt"), "--mode", "procrustes", "--lexicon", ws.p("lex.tsv")});
    REQUIRE_MESSAGE(pro.status == 0, pro.err);
    CHECK(json::parse(ws.read("align_report.json"))["accuracy"]["accuracy"].get<double>() == 1.0);
    CHECK((load_alignment(ws.dir / "alignment.json").matrix - ws.rotation).cwiseAbs().maxCoeff() < 1e-6);

    const auto adv = nehs_run({"--out-dir", ws.dir.string(), "align", "--source", ws.p("src.txt"), "--target",
                               ws.p("tgt.txt"), "--steps", "0", "--output", "zero.json"});
    REQUIRE_MESSAGE(adv.status == 0, adv.err);
    CHECK(load_alignment(ws.dir / "zero.json").matrix == Matrix::Identity(16, 16));

    const auto bad = nehs_run({"align", "--source", ws.p("src.txt"), "--target", ws.p("tgt.txt"), "--mode", "magic"});
    CHECK(bad.status == 2);
    CHECK(bad.err.find("adversarial") != std::string::npos);
    CHECK(bad.err.find("procrustes") != std::string::npos);
  }

  TEST_CASE("transfer through identity and orthogonal maps keeps F1") {
    Workspace ws;
    REQUIRE(nehs_run({"--out-dir", ws.dir.string(), "fit", "--embeddings", ws.p("src.txt"), "--dictionary",
                      ws.p("dict.tsv")}).status == 0);
    io::write_file(ws.dir / "identity.json",
                   to_json(AlignmentMap{Matrix::Identity(16, 16), "src", "src", "identity"}));
    const auto same = nehs_run({"--out-dir", ws.dir.string(), "transfer", "--map", ws.p("identity.json"), "--spheres",
                                ws.p("spheres.json"), "--source", ws.p("src.txt"), "--target", ws.p("src.txt"),
                                "--target-dictionary", ws.p("dict.tsv")});
    REQUIRE_MESSAGE(same.status == 0, same.err);
    for (const auto& row : json::parse(ws.read("transfer_report.json"))["types"]) {
      CHECK(std::abs(row["f_ratio"].get<double>() - 1.0) < 1e-9);
    }

    io::write_file(ws.dir / "rot.json", to_json(AlignmentMap{ws.rotation, "src", "tgt", "given"}));
    const auto rot = nehs_run({"--out-dir", ws.dir.string(), "transfer", "--map", ws.p("rot.json"), "--spheres",
                               ws.p("spheres.json"), "--source", ws.p("src.txt"), "--target", ws.p("tgt.txt"),
                               "--target-dictionary", ws.p("dict.tsv")});
    REQUIRE_MESSAGE(rot.status == 0, rot.err);
    for (const auto& row : json::parse(ws.read("transfer_report.json"))["types"]) {
      CHECK(std::abs(row["f_ratio"].get<double>() - 1.0) < 1e-6);
      CHECK(std::abs(row["transferred_radius"].get<double>() - row["source_radius"].get<double>()) < 1e-9);
    }

    io::write_file(ws.dir / "wide.json", to_json(AlignmentMap{Matrix::Identity(8, 16), "src", "x", "given"}));
    CHECK(nehs_run({"transfer", "--map", ws.p("wide.json"), "--spheres", ws.p("spheres.json"), "--source",
                    ws.p("src.txt"), "--target", ws.p("tgt.txt"), "--target-dictionary", ws.p("dict.tsv")})
              .status == 2);
  }

  TEST_CASE("featurize, tag-train and tag-eval") {
    Workspace ws;
    const std::string out = ws.dir.string();
    REQUIRE(nehs_run({"--out-dir", out, "fit", "--embeddings", ws.p("src.txt"), "--dictionary", ws.p("dict.tsv")})
                .status == 0);
    const auto one = nehs_run({"--out-dir", out, "featurize", "--embeddings", ws.p("src.txt"), "--spheres",
                               ws.p("spheres.json"), "--corpus", ws.p("one.conll"), "--output", "one.tsv"});
    REQUIRE_MESSAGE(one.status == 0, one.err);
    CHECK(load_feature_table(ws.dir / "one.tsv").size() == 1);

    for (const char* part : {"train", "test"}) {
      REQUIRE(nehs_run({"--out-dir", out, "featurize", "--embeddings", ws.p("src.txt"), "--spheres",
                        ws.p("spheres.json"), "--corpus", ws.p(std::string(part) + ".conll"), "--output",
                        std::string(part) + ".tsv"})
                  .status == 0);
    }
    const auto base = nehs_run({"--out-dir", out, "tag-train", "--train", ws.p("train.conll"), "--embeddings",
                                ws.p("src.txt"), "--epochs", "3", "--output", "base.json"});
    REQUIRE_MESSAGE(base.status == 0, base.err);
    const auto hs = nehs_run({"--out-dir", out, "tag-train", "--train", ws.p("train.conll"), "--embeddings",
                              ws.p("src.txt"), "--features", ws.p("train.tsv"), "--epochs", "3", "--output",
                              "hs.json"});
    REQUIRE_MESSAGE(hs.status == 0, hs.err);
    const auto eval = nehs_run({"--out-dir", out, "tag-eval", "--test", ws.p("test.conll"), "--embeddings",
                                ws.p("src.txt"), "--features", ws.p("test.tsv"), "--baseline", ws.p("base.json"),
                                "--hypersphere", ws.p("hs.json")});
    REQUIRE_MESSAGE(eval.status == 0, eval.err);
    const auto report = json::parse(ws.read("tag_eval_report.json"));
    const double fb = 100.0 * report["baseline"]["f1"].get<double>();
    const double fh = 100.0 * report["hypersphere"]["f1"].get<double>();
    CHECK(report["err"].get<double>() == doctest::Approx((fh - fb) / (100.0 - fb) * 100.0));
    CHECK(eval.out.find("ERR") != std::string::npos);

    const auto missing = nehs_run({"--out-dir", out, "tag-eval", "--test", ws.p("test.conll"), "--embeddings",
                                   ws.p("src.txt"), "--baseline", ws.p("hs.json")});
    CHECK(missing.status == 2);
  }

  TEST_CASE("project writes a CSV") {
    Workspace ws;
    const auto r = nehs_run({"--out-dir", ws.dir.string(), "project", "--embeddings", ws.p("line.txt")});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    std::istringstream csv(ws.read("projection.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "token,label,x,y");
    while (std::getline(csv, line)) {
      const auto fields = io::split(line, ',');
      double y = 1.0;
      REQUIRE(io::parse_double(fields[3], y));
      CHECK(std::abs(y) < 1e-9);
    }
    CHECK(nehs_run({"project", "--embeddings", ws.p("line.txt"), "--dim", "5"}).status == 2);
  }

  TEST_CASE("config file and environment defaults") {
    Workspace ws;
    std::ofstream cfg(ws.p("run.ini"));
    cfg << "out-dir = " << ws.dir.string() << "\n[fit]\nembeddings = " << ws.p("src.txt")
        << "\ndictionary = " << ws.p("dict.tsv") << "\noutput = from_config.json\n";
    cfg.close();
    const auto r = nehs_run({"--config", ws.p("run.ini"), "fit"});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(fs::exists(ws.dir / "from_config.json"));
    const auto o = nehs_run({"--config", ws.p("run.ini"), "fit", "--output", "from_flag.json"});
    REQUIRE(o.status == 0);
    CHECK(fs::exists(ws.dir / "from_flag.json"));

    ::setenv("NEHS_THREADS", "0", 1);
    CHECK(nehs_run({"--config", ws.p("run.ini"), "fit"}).status == 2);
    ::setenv("NEHS_THREADS", "2", 1);
    CHECK(nehs_run({"--config", ws.p("run.ini"), "fit"}).status == 0);
    ::unsetenv("NEHS_THREADS");
  }
}
