#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "ozsl/io_util.hpp"

namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "ozsl_unit_cli";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

int run(const std::string& args) {
  std::string cmd = "cd '" + workdir().string() + "' && '" + OZSL_CLI + "' " + args + " > out.txt 2> err.txt";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out() { return ozsl::read_file(workdir() / "out.txt"); }
std::string err() { return ozsl::read_file(workdir() / "err.txt"); }

void write(const std::string& name, const std::string& text) { ozsl::write_file(workdir() / name, text); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 1") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("parse") == 1);
  CHECK(run("embed-el -o e.tsv") == 1);
  CHECK(run("synth -o syn_bad --k-seen 0") == 1);
}

TEST_CASE("data errors exit with 2") {
  CHECK(run("parse missing.elf") == 2);
  write("bad.elf", "SubClassOf(A B)\n");
  CHECK(run("parse bad.elf") == 2);
  CHECK(err().find("'A'") != std::string::npos);
}

TEST_CASE("parse, normalize and classify") {
  write("kw.elf",
        "Concept(KW)\nConcept(TW)\nConcept(Whale)\nConcept(Patches)\nRelation(hasTexture)\n"
        "EquivalentTo(KW And(TW Some(hasTexture Patches)))\nSubClassOf(TW Whale)\n");
  REQUIRE(run("parse kw.elf") == 0);
  CHECK(out().find("EquivalentTo(KW And(TW Some(hasTexture Patches)))") != std::string::npos);
  REQUIRE(run("normalize kw.elf -o kw.norm") == 0);
  std::string norm = ozsl::read_file(workdir() / "kw.norm");
  CHECK(norm.find("NF4 TW NORM_1 KW") != std::string::npos);
  REQUIRE(run("classify kw.elf") == 0);
  CHECK(out().find("KW\tWhale\n") != std::string::npos);
}

TEST_CASE("embedding from a normalized file and divergence") {
  REQUIRE(run("embed-el --normalized kw.norm --dim 3 --epochs 20 --seed 1 --out kw.tsv") == 0);
  std::string first = ozsl::read_file(workdir() / "kw.tsv");
  CHECK(first.rfind("#dim\t3\n", 0) == 0);
  REQUIRE(run("embed-el kw.elf --dim 3 --epochs 20 --seed 1 --out kw2.tsv") == 0);
  CHECK(ozsl::read_file(workdir() / "kw2.tsv") == first);
  CHECK(run("embed-el kw.elf --dim 3 --epochs 20 --lr 1e308 --out kw3.tsv") == 3);
}

TEST_CASE("stage-by-stage commands") {
  REQUIRE(run("synth -o syn --per-class 10") == 0);
  REQUIRE(run("embed-el syn/ontology.elf --dim 8 --epochs 200 -o syn/emb.tsv") == 0);
  REQUIRE(run("project syn/ontology.elf -o syn/graph.tsv") == 0);
  REQUIRE(run("walk syn/ontology.elf --graph syn/graph.tsv -o syn/corpus.txt") == 0);
  REQUIRE(run("w2v syn/corpus.txt --dim 5 --epochs 5 -o syn/words.txt") == 0);
  REQUIRE(run("encode --split syn/split.txt --class-map syn/class_map.tsv --embedding syn/emb.tsv "
              "--word-vectors syn/words.txt --ontology syn/ontology.elf --components el_center,word -o syn/enc.tsv") == 0);
  REQUIRE(run("train-map --features syn/features.tsv --split syn/split.txt --encodings syn/enc.tsv -o syn/model.txt") ==
          0);
  REQUIRE(run("predict --features syn/features.tsv --split syn/split.txt --encodings syn/enc.tsv "
              "--model syn/model.txt -o syn/pred.tsv") == 0);
  REQUIRE(run("eval syn/pred.tsv --split syn/split.txt") == 0);
  CHECK(out().find("macro_unseen_accuracy") != std::string::npos);
  CHECK(run("train-map --features syn/features.tsv --split syn/split.txt --encodings syn/enc.tsv --mapper pca "
            "-o syn/m.txt") == 1);
}

TEST_CASE("pipeline with flag overrides") {
  REQUIRE(run("synth -o pipe") == 0);
  REQUIRE(run("pipeline pipe/config.txt --el_epochs 200 --output_dir out1") == 0);
  std::string report = ozsl::read_file(workdir() / "pipe" / "out1" / "report.txt");
  CHECK(report.find("el_epochs = 200\n") != std::string::npos);
  REQUIRE(run("pipeline pipe/config.txt --el_epochs 200 --output_dir out2") == 0);
  std::string again = ozsl::read_file(workdir() / "pipe" / "out2" / "report.txt");
  CHECK(again.substr(0, again.find("output_dir")) == report.substr(0, report.find("output_dir")));
  CHECK(run("pipeline pipe/config.txt --el_dim 0") == 1);
  CHECK(run("pipeline pipe/config.txt --components bogus") == 1);
  write("pipe/broken.elf", "Concept(A)\nSubClassOf(A B)\n");
  CHECK(run("pipeline pipe/config.txt --ontology broken.elf") == 2);
  CHECK(err().find("stage 'parse'") != std::string::npos);
}

}  // TEST_SUITE
