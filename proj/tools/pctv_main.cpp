#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pctv/pctv.h"

namespace {

int exit_code(int status) {
    switch (status) {
        case PCTV_OK: return 0;
        case PCTV_ERR_CONFIG: return 2;
        case PCTV_ERR_IO: return 3;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph total variation and transport experiments on random point clouds"};
    app.set_version_flag("--version", std::string(pctv_version()));
    app.require_subcommand(1);

    struct Sub {
        std::string name;
        CLI::App* cmd;
    };
    std::vector<Sub> subs;
    std::string config_path, out_dir;
    for (size_t k = 0; const char* name = pctv_experiment_name(k); ++k) {
        auto* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        cmd->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "output directory")->required();
        subs.push_back({name, cmd});
    }
    CLI11_PARSE(app, argc, argv);

    for (const auto& s : subs) {
        if (!s.cmd->parsed()) continue;
        std::ifstream in(config_path, std::ios::binary);
        std::stringstream text;
        text << in.rdbuf();
        if (!in) {
            std::fprintf(stderr, "pctv: cannot read %s\n", config_path.c_str());
            return 3;
        }
        const int status = pctv_experiment_run(s.name.c_str(), text.str().c_str(), out_dir.c_str());
        if (status != PCTV_OK) {
            std::fprintf(stderr, "pctv: %s error: %s\n", pctv_status_name(status), pctv_last_error());
            return exit_code(status);
        }
        std::printf("%s: wrote %s/%s.csv and .json\n", s.name.c_str(), out_dir.c_str(), s.name.c_str());
        return 0;
    }
    return 1;
}
