#include "bansa.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "acquisition.hpp"
#include "errors.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "tensor_io.hpp"
#include "verify.hpp"

using namespace bansa;

namespace {

thread_local std::string g_last_error;

bansa_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_input: return BANSA_ERR_INVALID_INPUT;
        case ErrorCode::shape_mismatch: return BANSA_ERR_SHAPE;
        case ErrorCode::degenerate_correlation: return BANSA_ERR_DEGENERATE_CORRELATION;
        case ErrorCode::insufficient_pool: return BANSA_ERR_INSUFFICIENT_POOL;
        case ErrorCode::bad_config: return BANSA_ERR_CONFIG;
        case ErrorCode::bad_magic: return BANSA_ERR_BAD_MAGIC;
        case ErrorCode::bad_version: return BANSA_ERR_BAD_VERSION;
        case ErrorCode::truncated_payload: return BANSA_ERR_TRUNCATED_PAYLOAD;
        case ErrorCode::dim_overflow: return BANSA_ERR_DIM_OVERFLOW;
        case ErrorCode::io_failure: return BANSA_ERR_IO;
        case ErrorCode::internal: return BANSA_ERR_INTERNAL;
    }
    return BANSA_ERR_INTERNAL;
}

template <typename Fn>
bansa_status guarded(Fn&& fn) {
    try {
        fn();
        return BANSA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BANSA_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return BANSA_ERR_INTERNAL;
    }
}

char* copy_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out != nullptr) {
        std::memcpy(out, text.c_str(), text.size() + 1);
    }
    return out;
}

AttentionMap map_from_tensor(const Tensor& tensor) {
    if (tensor.rank() != 2) {
        fail(ErrorCode::invalid_input, "attention map tensor must have rank 2");
    }
    return AttentionMap::validated(
        Matrix::from_data(tensor.dims[0], tensor.dims[1], tensor.values));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        fail(ErrorCode::io_failure, "cannot open for writing: " + path.string());
    }
    out << text;
    if (!out) {
        fail(ErrorCode::io_failure, "write failed: " + path.string());
    }
}

}  // namespace

struct bansa_tensor {
    Tensor tensor;
};

extern "C" {

const char* bansa_version(void) { return "1.0.0"; }

const char* bansa_last_error(void) { return g_last_error.c_str(); }

int bansa_exit_code(bansa_status status) {
    if (status == BANSA_OK) return 0;
    if (status <= BANSA_ERR_CONFIG) return 1;
    if (status <= BANSA_ERR_IO) return 2;
    return 3;
}

void bansa_string_free(char* text) { std::free(text); }

bansa_status bansa_tensor_create(uint16_t rank, const uint64_t* dims, const double* data,
                                 bansa_tensor** out) {
    return guarded([&] {
        if (out == nullptr || (rank > 0 && dims == nullptr)) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        Tensor tensor;
        tensor.dims.assign(dims, dims + rank);
        const std::uint64_t count = checked_element_count(tensor.dims);
        if (count > 0) {
            if (data == nullptr) {
                fail(ErrorCode::invalid_input, "null data for nonempty tensor");
            }
            tensor.values.assign(data, data + count);
        }
        *out = new bansa_tensor{std::move(tensor)};
    });
}

bansa_status bansa_tensor_read(const char* path, bansa_tensor** out) {
    return guarded([&] {
        if (path == nullptr || out == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        *out = new bansa_tensor{read_tensor(path)};
    });
}

bansa_status bansa_tensor_write(const bansa_tensor* tensor, const char* path) {
    return guarded([&] {
        if (tensor == nullptr || path == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        write_tensor(path, tensor->tensor);
    });
}

uint16_t bansa_tensor_rank(const bansa_tensor* tensor) {
    return tensor == nullptr ? 0 : static_cast<uint16_t>(tensor->tensor.rank());
}

uint64_t bansa_tensor_dim(const bansa_tensor* tensor, uint16_t axis) {
    if (tensor == nullptr || axis >= tensor->tensor.rank()) return 0;
    return tensor->tensor.dims[axis];
}

uint64_t bansa_tensor_element_count(const bansa_tensor* tensor) {
    return tensor == nullptr ? 0 : tensor->tensor.values.size();
}

const double* bansa_tensor_data(const bansa_tensor* tensor) {
    return tensor == nullptr ? nullptr : tensor->tensor.values.data();
}

void bansa_tensor_free(bansa_tensor* tensor) { delete tensor; }

bansa_status bansa_score_map(const bansa_tensor* map, uint32_t k, double drop_prob,
                             uint64_t stream_seed, double* score_out) {
    return guarded([&] {
        if (map == nullptr || score_out == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        const AttentionMap attention = map_from_tensor(map->tensor);
        const RngStream stream = make_stream(stream_seed, "mask", 0);
        *score_out = bansa_e(attention, k, drop_prob, stream).value;
    });
}

bansa_status bansa_score_record(const bansa_tensor* map, uint32_t k, double drop_prob,
                                uint64_t stream_seed, char** json_out) {
    return guarded([&] {
        if (map == nullptr || json_out == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        const AttentionMap attention = map_from_tensor(map->tensor);
        const RngStream stream = make_stream(stream_seed, "mask", 0);
        const AcquisitionScore score = bansa_e(attention, k, drop_prob, stream);
        const nlohmann::json record = build_score_record(
            attention.rows(), attention.cols(), k, drop_prob, stream_seed, score);
        *json_out = copy_string(record.dump(2));
    });
}

bansa_status bansa_select(const char* config_path, const char* out_dir,
                          char** report_path_out) {
    return guarded([&] {
        if (config_path == nullptr || out_dir == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        const RunConfig config = load_config(config_path);
        const PipelineResult result = run_pipeline(config);
        const std::filesystem::path report_path = write_selection_outputs(result, out_dir);
        if (report_path_out != nullptr) {
            *report_path_out = copy_string(report_path.string());
        }
    });
}

bansa_status bansa_probe_layers(const char* config_path, const char* out_dir,
                                char** report_path_out, char** curve_path_out) {
    return guarded([&] {
        if (config_path == nullptr || out_dir == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        const RunConfig config = load_config(config_path);
        const ProbeResult result = run_layer_probe(config);

        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) {
            fail(ErrorCode::io_failure, std::string("cannot create output directory: ") + out_dir);
        }
        const std::filesystem::path report_path =
            std::filesystem::path(out_dir) / "layer_profile.json";
        const std::filesystem::path curve_path =
            std::filesystem::path(out_dir) / "layer_curve.tsv";
        write_text(report_path, build_probe_report(result).dump(2) + "\n");
        write_text(curve_path, probe_curve_tsv(result.profile));
        if (report_path_out != nullptr) {
            *report_path_out = copy_string(report_path.string());
        }
        if (curve_path_out != nullptr) {
            *curve_path_out = copy_string(curve_path.string());
        }
    });
}

bansa_status bansa_analyze_files(const char* const* group_a, size_t count_a,
                                 const char* const* group_b, size_t count_b,
                                 double cutoff, char** json_out) {
    return guarded([&] {
        if (json_out == nullptr || (count_a > 0 && group_a == nullptr) ||
            (count_b > 0 && group_b == nullptr)) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        std::vector<std::filesystem::path> a(group_a, group_a + count_a);
        std::vector<std::filesystem::path> b(group_b, group_b + count_b);
        const AnalysisResult result = analyze_files(a, b, cutoff);
        *json_out = copy_string(build_analysis_report(result).dump(2));
    });
}

bansa_status bansa_analyze_report(const char* report_path, char** json_out) {
    return guarded([&] {
        if (report_path == nullptr || json_out == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        const ReportAnalysis analysis = analyze_report(report_path);
        *json_out = copy_string(build_report_analysis(analysis).dump(2));
    });
}

bansa_status bansa_oracle(char** text_out, int* failures_out) {
    return guarded([&] {
        if (text_out == nullptr || failures_out == nullptr) {
            fail(ErrorCode::invalid_input, "null argument");
        }
        std::string text;
        *failures_out = run_oracle_suite(text);
        *text_out = copy_string(text);
    });
}

}  // extern "C"
