// AES-NI block bodies.  This file is the only one compiled with -maes; the
// portable dispatcher in aes.cpp never calls in here unless cpuid says the
// instructions exist.

#include <cstddef>
#include <cstdint>

#if defined(__x86_64__) || defined(__i386__)
#include <cpuid.h>
#include <wmmintrin.h>

namespace cforam::detail {

bool aesni_available() {
    unsigned eax, ebx, ecx, edx;
    if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
    return (ecx & bit_AES) != 0;
}

void aesni_encrypt_blocks(const uint8_t* round_keys, const uint8_t* in,
                          uint8_t* out, size_t n) {
    const __m128i* rk = reinterpret_cast<const __m128i*>(round_keys);
    __m128i k[11];
    for (int i = 0; i < 11; ++i) k[i] = _mm_loadu_si128(rk + i);

    size_t i = 0;
    // Four blocks in flight to keep the AES unit's pipeline busy.
    for (; i + 4 <= n; i += 4) {
        const __m128i* src = reinterpret_cast<const __m128i*>(in + 16 * i);
        __m128i b0 = _mm_xor_si128(_mm_loadu_si128(src + 0), k[0]);
        __m128i b1 = _mm_xor_si128(_mm_loadu_si128(src + 1), k[0]);
        __m128i b2 = _mm_xor_si128(_mm_loadu_si128(src + 2), k[0]);
        __m128i b3 = _mm_xor_si128(_mm_loadu_si128(src + 3), k[0]);
        for (int r = 1; r < 10; ++r) {
            b0 = _mm_aesenc_si128(b0, k[r]);
            b1 = _mm_aesenc_si128(b1, k[r]);
            b2 = _mm_aesenc_si128(b2, k[r]);
            b3 = _mm_aesenc_si128(b3, k[r]);
        }
        __m128i* dst = reinterpret_cast<__m128i*>(out + 16 * i);
        _mm_storeu_si128(dst + 0, _mm_aesenclast_si128(b0, k[10]));
        _mm_storeu_si128(dst + 1, _mm_aesenclast_si128(b1, k[10]));
        _mm_storeu_si128(dst + 2, _mm_aesenclast_si128(b2, k[10]));
        _mm_storeu_si128(dst + 3, _mm_aesenclast_si128(b3, k[10]));
    }
    for (; i < n; ++i) {
        __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in + 16 * i));
        b = _mm_xor_si128(b, k[0]);
        for (int r = 1; r < 10; ++r) b = _mm_aesenc_si128(b, k[r]);
        b = _mm_aesenclast_si128(b, k[10]);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 16 * i), b);
    }
}

}  // namespace cforam::detail
#endif
