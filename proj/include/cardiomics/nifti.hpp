#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "cardiomics/volume.hpp"

namespace cardiomics {
namespace nifti {

// NIfTI-1 datatype codes
inline constexpr int16_t kDtUint8 = 2;
inline constexpr int16_t kDtInt16 = 4;
inline constexpr int16_t kDtInt32 = 8;
inline constexpr int16_t kDtFloat32 = 16;
inline constexpr int16_t kDtFloat64 = 64;

inline constexpr int kHeaderSize = 348;

// The subset of the 348-byte header this reader consumes, at their fixed offsets.
struct Header {
    int32_t sizeof_hdr = kHeaderSize;  // offset 0
    int16_t dim[8] = {};               // offset 40
    int16_t datatype = 0;              // offset 70
    int16_t bitpix = 0;                // offset 72
    float pixdim[8] = {};              // offset 76
    float vox_offset = 352.0f;         // offset 108
    float scl_slope = 0.0f;            // offset 112
    float scl_inter = 0.0f;            // offset 116
    char magic[4] = {'n', '+', '1', '\0'};  // offset 344
};

namespace detail {

class GzReader {
  public:
    explicit GzReader(const std::string& path) : f_(gzopen(path.c_str(), "rb")) {
        if (!f_) throw std::runtime_error("nifti: cannot open '" + path + "'");
    }
    ~GzReader() {
        if (f_) gzclose(f_);
    }
    GzReader(const GzReader&) = delete;
    GzReader& operator=(const GzReader&) = delete;

    void read(void* dst, std::size_t n, const std::string& what) {
        const int got = gzread(f_, dst, static_cast<unsigned>(n));
        if (got < 0 || static_cast<std::size_t>(got) != n)
            throw std::runtime_error("nifti: truncated file while reading " + what);
    }
    void skip(std::size_t n) {
        if (gzseek(f_, static_cast<z_off_t>(n), SEEK_CUR) < 0)
            throw std::runtime_error("nifti: seek failed");
    }

  private:
    gzFile f_ = nullptr;
};

template <typename T>
T load_at(const unsigned char* buf, std::size_t offset) {
    T v;
    std::memcpy(&v, buf + offset, sizeof(T));
    return v;
}

template <typename T>
void store_at(unsigned char* buf, std::size_t offset, T v) {
    std::memcpy(buf + offset, &v, sizeof(T));
}

template <typename T>
void convert_voxels(const std::vector<unsigned char>& raw, std::vector<double>& out,
                    double slope, double inter) {
    const std::size_t n = raw.size() / sizeof(T);
    out.resize(n);
    const T* src = reinterpret_cast<const T*>(raw.data());
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<double>(src[i]) * slope + inter;
}

}  // namespace detail

inline Header parse_header(const unsigned char* buf) {
    Header h;
    h.sizeof_hdr = detail::load_at<int32_t>(buf, 0);
    for (int i = 0; i < 8; ++i) h.dim[i] = detail::load_at<int16_t>(buf, 40 + 2 * i);
    h.datatype = detail::load_at<int16_t>(buf, 70);
    h.bitpix = detail::load_at<int16_t>(buf, 72);
    for (int i = 0; i < 8; ++i) h.pixdim[i] = detail::load_at<float>(buf, 76 + 4 * i);
    h.vox_offset = detail::load_at<float>(buf, 108);
    h.scl_slope = detail::load_at<float>(buf, 112);
    h.scl_inter = detail::load_at<float>(buf, 116);
    std::memcpy(h.magic, buf + 344, 4);
    return h;
}

inline int bytes_per_voxel(int16_t datatype) {
    switch (datatype) {
        case kDtUint8: return 1;
        case kDtInt16: return 2;
        case kDtInt32: return 4;
        case kDtFloat32: return 4;
        case kDtFloat64: return 8;
        default:
            throw std::runtime_error("nifti: unsupported datatype code " + std::to_string(datatype));
    }
}

/// Reads a NIfTI-1 volume (.nii or .nii.gz, little-endian single-file form).
/// Intensities are scaled by scl_slope/scl_inter when scl_slope != 0.
inline ImageVolume read(const std::string& path) {
    detail::GzReader in(path);

    unsigned char buf[kHeaderSize];
    in.read(buf, kHeaderSize, "header");
    const Header h = parse_header(buf);

    if (h.sizeof_hdr != kHeaderSize) {
        // 1543569408 is 348 byte-swapped: a big-endian file, which we do not support.
        if (h.sizeof_hdr == 1543569408)
            throw std::runtime_error("nifti: big-endian files are not supported: '" + path + "'");
        throw std::runtime_error("nifti: '" + path + "' is not a NIfTI-1 file (sizeof_hdr=" +
                                 std::to_string(h.sizeof_hdr) + ")");
    }
    if (std::strncmp(h.magic, "n+1", 3) != 0) {
        if (std::strncmp(h.magic, "ni1", 3) == 0)
            throw std::runtime_error("nifti: two-file (.hdr/.img) form is not supported: '" + path + "'");
        throw std::runtime_error("nifti: bad magic in '" + path + "'");
    }

    const int ndim = h.dim[0];
    if (ndim < 3 || ndim > 7)
        throw std::runtime_error("nifti: expected a 3D volume, got dim[0]=" + std::to_string(ndim));
    for (int i = 4; i <= ndim; ++i)
        if (h.dim[i] > 1)
            throw std::runtime_error("nifti: expected a 3D volume, but dim[" + std::to_string(i) +
                                     "]=" + std::to_string(h.dim[i]));

    ImageVolume vol;
    vol.dims = Dims{h.dim[1], h.dim[2], h.dim[3]};
    if (vol.dims.nx <= 0 || vol.dims.ny <= 0 || vol.dims.nz <= 0)
        throw std::runtime_error("nifti: non-positive dimensions in '" + path + "'");
    vol.spacing = {static_cast<double>(h.pixdim[1]), static_cast<double>(h.pixdim[2]),
                   static_cast<double>(h.pixdim[3])};

    const int bpv = bytes_per_voxel(h.datatype);
    if (h.vox_offset < kHeaderSize)
        throw std::runtime_error("nifti: invalid vox_offset in '" + path + "'");
    in.skip(static_cast<std::size_t>(h.vox_offset) - kHeaderSize);

    std::vector<unsigned char> raw(vol.dims.size() * static_cast<std::size_t>(bpv));
    in.read(raw.data(), raw.size(), "voxel data");

    const double slope = (h.scl_slope != 0.0f) ? static_cast<double>(h.scl_slope) : 1.0;
    const double inter = (h.scl_slope != 0.0f) ? static_cast<double>(h.scl_inter) : 0.0;
    switch (h.datatype) {
        case kDtUint8: detail::convert_voxels<uint8_t>(raw, vol.voxels, slope, inter); break;
        case kDtInt16: detail::convert_voxels<int16_t>(raw, vol.voxels, slope, inter); break;
        case kDtInt32: detail::convert_voxels<int32_t>(raw, vol.voxels, slope, inter); break;
        case kDtFloat32: detail::convert_voxels<float>(raw, vol.voxels, slope, inter); break;
        case kDtFloat64: detail::convert_voxels<double>(raw, vol.voxels, slope, inter); break;
        default: break;  // unreachable, bytes_per_voxel already threw
    }

    vol.validate();
    return vol;
}

/// Writes a float64 NIfTI-1 file; gzip-compressed when the path ends in ".gz".
/// Mainly used to author test fixtures and interoperate with external viewers.
inline void write(const ImageVolume& vol, const std::string& path,
                  float scl_slope = 0.0f, float scl_inter = 0.0f) {
    vol.validate();
    std::vector<unsigned char> buf(kHeaderSize + 4, 0);  // header + 4-byte extension pad
    detail::store_at<int32_t>(buf.data(), 0, kHeaderSize);
    detail::store_at<int16_t>(buf.data(), 40, 3);
    detail::store_at<int16_t>(buf.data(), 42, static_cast<int16_t>(vol.dims.nx));
    detail::store_at<int16_t>(buf.data(), 44, static_cast<int16_t>(vol.dims.ny));
    detail::store_at<int16_t>(buf.data(), 46, static_cast<int16_t>(vol.dims.nz));
    for (int i = 4; i < 8; ++i) detail::store_at<int16_t>(buf.data(), 40 + 2 * i, 1);
    detail::store_at<int16_t>(buf.data(), 70, kDtFloat64);
    detail::store_at<int16_t>(buf.data(), 72, 64);
    detail::store_at<float>(buf.data(), 76, 1.0f);
    for (int i = 0; i < 3; ++i)
        detail::store_at<float>(buf.data(), 80 + 4 * i, static_cast<float>(vol.spacing[i]));
    detail::store_at<float>(buf.data(), 108, 352.0f);
    detail::store_at<float>(buf.data(), 112, scl_slope);
    detail::store_at<float>(buf.data(), 116, scl_inter);
    std::memcpy(buf.data() + 344, "n+1", 4);

    const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
    gzFile f = gzopen(path.c_str(), gz ? "wb" : "wbT");  // 'T' stores uncompressed
    if (!f) throw std::runtime_error("nifti: cannot open '" + path + "' for writing");
    bool ok = gzwrite(f, buf.data(), static_cast<unsigned>(buf.size())) ==
              static_cast<int>(buf.size());
    ok = ok && gzwrite(f, vol.voxels.data(),
                       static_cast<unsigned>(vol.voxels.size() * sizeof(double))) ==
                   static_cast<int>(vol.voxels.size() * sizeof(double));
    gzclose(f);
    if (!ok) throw std::runtime_error("nifti: short write to '" + path + "'");
}

}  // namespace nifti
}  // namespace cardiomics
