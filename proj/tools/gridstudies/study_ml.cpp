#include <fstream>
#include <iostream>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"
#include "gridstudies/ml/knn.hpp"
#include "gridstudies/ml/model_io.hpp"
#include "gridstudies/studies/pipelines.hpp"
#include "studies.hpp"

namespace gridstudies::cli {

namespace {

// Power,Duration,Stability as written by the stability sweep.
ml::Dataset read_sweep_dataset(const std::filesystem::path& path) {
    const auto t = csv::read_table(path);
    const std::vector<std::string> want{"Power", "Duration", "Stability"};
    if (t.header != want) throw ParseError(path.string() + ": expected header Power,Duration,Stability", 1);
    std::vector<stability::SweepRow> rows;
    for (const auto& [line, f] : t.rows) {
        stability::SweepRow r;
        r.power_mw = csv::parse_double(f[0], line);
        r.duration_ms = csv::parse_double(f[1], line);
        r.stability = static_cast<int>(csv::parse_int(f[2], line));
        rows.push_back(r);
    }
    return studies::stability_dataset(rows);
}

}  // namespace

StudyDef ml_study() {
    StudyDef def;
    def.name = "ml";
    def.description = "SVM, MLP and kNN classifiers on the stability grid";
    def.defaults = [] {
        json j;
        j["dataset"] = "stability";
        j["train_fraction"] = 0.8;
        j["svm"] = {{"c", 1.0}, {"sigma", 0.0}};
        j["mlp"] = {{"hidden", {8, 8}}, {"narrow_hidden", {1}}, {"epochs", 20000}, {"learning_rate", 0.5}, {"loss_threshold", 0.0}};
        j["knn_k"] = 1;
        return j;
    };
    def.flags = [](CLI::App& app, FlagSet& f) {
        f.option<std::string>(app, "--dataset", "dataset", "'stability' to regenerate the grid, or a Power,Duration,Stability CSV");
        f.option<double>(app, "--train-fraction", "train_fraction", "Fraction of rows used for training");
        f.option<int>(app, "--epochs", "mlp.epochs", "MLP epoch budget");
    };
    def.run = [](RunContext& ctx) {
        const Params p = ctx.p();
        studies::StabilityMlConfig cfg;
        cfg.seed = ctx.seed;
        cfg.train_fraction = p.num("train_fraction");
        if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) throw ConfigError("key '" + p.name("train_fraction") + "' must lie in (0, 1)");
        const Params s = p.sub("svm");
        cfg.svm.c = s.num("c");
        cfg.svm.sigma = s.num("sigma");
        const Params m = p.sub("mlp");
        cfg.deep_hidden = m.ints("hidden");
        cfg.narrow_hidden = m.ints("narrow_hidden");
        cfg.mlp.epochs = static_cast<int>(m.count("epochs"));
        cfg.mlp.learning_rate = m.num("learning_rate");
        cfg.mlp.loss_threshold = m.num("loss_threshold");
        cfg.knn_k = static_cast<int>(p.integer("knn_k"));
        for (const auto* layers : {&cfg.deep_hidden, &cfg.narrow_hidden}) {
            for (int n : *layers) {
                if (n < 1) throw ConfigError("key '" + m.name("hidden") + "' layer sizes must be positive");
            }
        }
        if (cfg.knn_k < 1) throw ConfigError("key '" + p.name("knn_k") + "' must be at least 1");

        const std::string source = p.str("dataset");
        ml::Dataset data;
        if (source == "stability") {
            const auto rows = studies::reference_stability_grid({}, ctx.threads);
            stability::write_sweep_csv(ctx.output("dataset.csv"), rows);
            data = studies::stability_dataset(rows);
        } else {
            data = read_sweep_dataset(source);
        }
        const auto res = studies::stability_ml(data, cfg);

        std::vector<std::vector<std::string>> rows;
        for (const auto& sc : res.scores) {
            rows.push_back({sc.name, csv::fixed(sc.test.match, 6), csv::fixed(sc.test.mismatch, 6), std::to_string(sc.test.count)});
        }
        csv::write_table(ctx.output("agreement.csv"), {"Model", "Match", "Mismatch", "Count"}, rows);
        ml::save_text(ctx.output("svm.json"), ml::to_json(res.svm));
        ml::save_text(ctx.output("mlp_deep.json"), ml::to_json(res.deep, res.scaler));
        ml::save_text(ctx.output("mlp_narrow.json"), ml::to_json(res.narrow, res.scaler));
        ml::save_text(ctx.output("knn.json"), ml::to_json(ml::KnnModel(res.train, cfg.knn_k)));
        std::ofstream out(ctx.output("summary.txt"));
        out << "Training rows = " << res.train.size() << "\nTest rows = " << res.test.size() << '\n';
        for (const auto& sc : res.scores) out << "Agreement " << sc.name << " = " << csv::fixed(sc.test.match, 6) << '\n';
        out << "Gradient check max relative error = " << csv::format(res.gradient_error, 6) << '\n';
        for (const auto& sc : res.scores) std::cout << sc.name << ' ' << csv::fixed(sc.test.match, 4) << '\n';
    };
    return def;
}

}  // namespace gridstudies::cli
