/// Crude upper bound on the number of linear regions of a width-`W`,
/// depth-`L` ReLU-type net on `ℝ^d`: `W + 1` for a single layer on the line,
/// `W^{dL}` otherwise.
///
/// Advisory: the constant in front of `W^{dL}` is unknown and taken as 1.
pub fn upper_region_bound(w: u64, l: u64, d: u64) -> f64 {
    if l == 1 && d == 1 {
        (w + 1) as f64
    } else {
        (w as f64).powf((d * l) as f64)
    }
}

/// True when the pigeonhole principle rules out moment injectivity on an
/// alphabet of the given size: some region must hold `d + 2` letters once
/// `|Σ| > regions · (d + 1)`. Advisory, see [`upper_region_bound`].
pub fn pwl_pigeonhole_bound(w: u64, l: u64, d: u64, alphabet_size: u64) -> bool {
    alphabet_size as f64 > upper_region_bound(w, l, d) * (d + 1) as f64
}
