#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ipt/analysis.hpp"
#include "ipt/golden.hpp"
#include "ipt/image_transforms.hpp"
#include "ipt/metrics.hpp"
#include "ipt/mock_model.hpp"
#include "ipt/protocol.hpp"

namespace py = pybind11;

namespace {

std::vector<std::uint8_t> to_vector(const py::bytes& b) {
  const std::string_view s = b;
  return {s.begin(), s.end()};
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

using Frames = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_ipt_probe, m) {
  m.doc() = "Bindings for the ipt-probe core: wire protocol, metrics, transforms and PCA.";

  // Leaked on purpose: the translator can run during interpreter teardown.
  static PyObject* error = py::exception<ipt::Error>(m, "Error", PyExc_RuntimeError).release().ptr();
  static PyObject* config_error = py::exception<ipt::ConfigError>(m, "ConfigError", error).release().ptr();
  static PyObject* data_error = py::exception<ipt::DataError>(m, "DataError", error).release().ptr();
  static PyObject* endpoint_error = py::exception<ipt::EndpointError>(m, "EndpointError", error).release().ptr();
  static PyObject* protocol_error =
      py::exception<ipt::ProtocolError>(m, "ProtocolError", endpoint_error).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ipt::ProtocolError& e) {
      py::set_error(protocol_error, e.what());
    } catch (const ipt::ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const ipt::DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const ipt::EndpointError& e) {
      py::set_error(endpoint_error, e.what());
    } catch (const ipt::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.attr("PROTOCOL_VERSION") = ipt::kProtocolVersion;
  m.attr("MAX_HEADER_BYTES") = ipt::kMaxHeaderBytes;
  m.attr("MAX_PAYLOAD_BYTES") = ipt::kMaxPayloadBytes;

  m.def(
      "encode_message",
      [](const std::string& header_json, const py::bytes& payload) {
        const auto header = nlohmann::json::parse(header_json);
        return to_bytes(ipt::encode_message(header, to_vector(payload)));
      },
      py::arg("header_json"), py::arg("payload") = py::bytes());

  m.def(
      "decode_message",
      [](const py::bytes& data) {
        std::size_t consumed = 0;
        const auto msg = ipt::decode_message(to_vector(data), &consumed);
        return py::make_tuple(msg.header.dump(), to_bytes(msg.payload), consumed);
      },
      py::arg("data"), "Returns (header_json, payload, bytes_consumed) for the frame at the start of data.");

  m.def("golden_vectors", [] {
    py::dict out;
    for (const auto& [name, bytes] : ipt::golden_vectors()) out[py::str(name)] = to_bytes(bytes);
    return out;
  });

  m.def(
      "mock_exchange",
      [](const py::bytes& request, const std::vector<std::string>& labels, const std::string& mode,
         std::uint64_t seed) {
        const ipt::MockModel model(ipt::LabelSpace(labels), ipt::parse_mock_mode(mode), seed);
        const auto in_bytes = to_vector(request);
        ipt::SpanSource in(in_bytes);
        ipt::VectorSink out;
        ipt::serve(in, out, model);
        return to_bytes(out.data);
      },
      py::arg("request"), py::arg("labels"), py::arg("mode") = "uniform", py::arg("seed") = 0,
      "Feeds request frames to the mock model and returns every byte it wrote back.");

  m.def(
      "changing_rates",
      [](double acc_o, double acc_f, double acc_b) -> std::optional<std::pair<double, double>> {
        const auto r = ipt::changing_rates(acc_o, acc_f, acc_b);
        if (!r) return std::nullopt;
        return std::pair{r->cr_f, r->cr_b};
      },
      "(cr_f, cr_b), or None when acc_o is 0.");

  m.def(
      "classify_regime",
      [](double cr_f, double cr_b, double tau_lo, double tau_hi) {
        return std::string(ipt::regime_name(ipt::classify_regime(cr_f, cr_b, {tau_lo, tau_hi})));
      },
      py::arg("cr_f"), py::arg("cr_b"), py::arg("tau_lo") = 0.25, py::arg("tau_hi") = 0.75);

  m.def(
      "apply_transform",
      [](const Frames& frames, const std::string& spec_json, const std::string& video_id) {
        if (frames.ndim() != 4 || frames.shape(3) != 3) throw ipt::DataError("expected frames of shape (n, h, w, 3)");
        const auto n = static_cast<std::size_t>(frames.shape(0));
        const auto h = static_cast<std::uint32_t>(frames.shape(1));
        const auto w = static_cast<std::uint32_t>(frames.shape(2));
        const std::size_t frame_bytes = std::size_t{w} * h * 3;
        std::vector<ipt::Frame> fs;
        for (std::size_t i = 0; i < n; ++i) {
          const auto* p = frames.data() + i * frame_bytes;
          fs.emplace_back(w, h, std::vector<std::uint8_t>(p, p + frame_bytes));
        }
        const auto spec = nlohmann::json::parse(spec_json).get<ipt::ImageTransformSpec>();
        const auto out = ipt::apply_transform(ipt::Video(video_id, 0, 30.0, std::move(fs)), spec);
        Frames result({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(h), static_cast<py::ssize_t>(w),
                       py::ssize_t{3}});
        auto* dst = result.mutable_data();
        for (std::size_t i = 0; i < n; ++i) {
          const auto px = out.frames()[i].pixels();
          std::copy(px.begin(), px.end(), dst + i * frame_bytes);
        }
        return result;
      },
      py::arg("frames"), py::arg("spec_json"), py::arg("video_id") = "video");

  m.def(
      "pca",
      [](const Eigen::MatrixXd& samples, std::size_t d) {
        const auto e = ipt::pca(samples, d);
        py::dict out;
        out["components"] = e.components;
        out["explained_variance"] = e.explained_variance;
        out["coords"] = e.coords;
        out["mean"] = e.mean;
        out["rank_deficient"] = e.rank_deficient;
        return out;
      },
      py::arg("samples"), py::arg("d") = 3);

  m.def("loop_closure", [](const Eigen::MatrixXd& coords) { return ipt::loop_closure(coords); });
}
