//! Diagnostic raster: escape-time shading, the preimage curves of the cut
//! ray, and a cross marker on every solved orbit point. Binary PPM (P6).

use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

use perorbit_core::function_model::{deriv, dist_to_delta, eval, FunctionSpec};
use perorbit_core::partition::PartitionSpec;
use perorbit_core::solver::PeriodicPointResult;

const ESCAPE_RADIUS: f64 = 1e3;
const MAX_SHADE_ITER: u32 = 64;
const MARKER: [u8; 3] = [255, 40, 40];
const CUT_PREIMAGE: [u8; 3] = [40, 220, 220];

pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Image {
    fn new(width: usize, height: usize) -> Self {
        Image { width, height, data: vec![0; 3 * width * height] }
    }

    fn put(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return;
        }
        let at = 3 * (y as usize * self.width + x as usize);
        self.data[at..at + 3].copy_from_slice(&rgb);
    }

    /// Number of pixels carrying exactly the marker color.
    pub fn marker_pixel_count(&self) -> usize {
        self.data.chunks_exact(3).filter(|px| *px == MARKER).count()
    }
}

struct Viewport {
    x0: f64,
    y0: f64,
    scale: f64, // plane units per pixel
}

impl Viewport {
    fn covering(points: &[Complex64], r: f64, width: usize, height: usize) -> Viewport {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = if points.is_empty() {
            (-3.0 * r, 3.0 * r, -2.25 * r, 2.25 * r)
        } else {
            let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for p in points {
                b.0 = b.0.min(p.re);
                b.1 = b.1.max(p.re);
                b.2 = b.2.min(p.im);
                b.3 = b.3.max(p.im);
            }
            b
        };
        // 20% margin, then a minimum extent so single points stay visible.
        let dx = (xmax - xmin).max(1.0);
        let dy = (ymax - ymin).max(1.0);
        xmin -= 0.2 * dx;
        xmax += 0.2 * dx;
        ymin -= 0.2 * dy;
        ymax += 0.2 * dy;
        let scale = ((xmax - xmin) / width as f64).max((ymax - ymin) / height as f64);
        let cx = 0.5 * (xmin + xmax);
        let cy = 0.5 * (ymin + ymax);
        Viewport {
            x0: cx - 0.5 * width as f64 * scale,
            y0: cy + 0.5 * height as f64 * scale,
            scale,
        }
    }

    fn plane(&self, px: usize, py: usize) -> Complex64 {
        Complex64::new(
            self.x0 + (px as f64 + 0.5) * self.scale,
            self.y0 - (py as f64 + 0.5) * self.scale,
        )
    }

    fn pixel(&self, z: Complex64) -> (i64, i64) {
        (
            ((z.re - self.x0) / self.scale - 0.5).round() as i64,
            ((self.y0 - z.im) / self.scale - 0.5).round() as i64,
        )
    }
}

fn escape_iterations(spec: &FunctionSpec, z0: Complex64) -> u32 {
    let mut z = z0;
    for n in 0..MAX_SHADE_ITER {
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() > ESCAPE_RADIUS {
            return n;
        }
        match eval(spec, z) {
            Ok(next) => z = next,
            Err(_) => return n, // pole: the orbit leaves through infinity
        }
    }
    MAX_SHADE_ITER
}

fn shade(n: u32) -> [u8; 3] {
    if n >= MAX_SHADE_ITER {
        return [12, 12, 28];
    }
    let t = n as f64 / MAX_SHADE_ITER as f64;
    let v = (255.0 * t.sqrt()) as u8;
    [v / 3, v / 2, v]
}

/// Renders the diagnostic into an in-memory image.
pub fn render_image(
    spec: &FunctionSpec,
    part: &PartitionSpec,
    results: &[PeriodicPointResult],
    width: usize,
    height: usize,
) -> Image {
    let orbit_points: Vec<Complex64> =
        results.iter().flat_map(|r| r.orbit.iter().copied()).collect();
    let view = Viewport::covering(&orbit_points, part.radius, width, height);
    let mut img = Image::new(width, height);

    let pixel_diag = view.scale * std::f64::consts::SQRT_2;
    for py in 0..height {
        for px in 0..width {
            let z = view.plane(px, py);
            let mut color = shade(escape_iterations(spec, z));
            // Preimages of the cut ray: f(z) lands within (roughly) a pixel
            // of the ray, with the band scaled by the local derivative.
            if let (Ok(w), Ok(dw)) = (eval(spec, z), deriv(spec, z)) {
                if w.norm() >= part.radius {
                    let band = 0.6 * dw.norm().max(1e-12) * pixel_diag;
                    if dist_to_delta(part.radius, part.delta_angle, w) <= band {
                        color = CUT_PREIMAGE;
                    }
                }
            }
            img.put(px as i64, py as i64, color);
        }
    }

    // Markers last so they are never overdrawn.
    for p in &orbit_points {
        let (x, y) = view.pixel(*p);
        img.put(x, y, MARKER);
        img.put(x - 1, y, MARKER);
        img.put(x + 1, y, MARKER);
        img.put(x, y - 1, MARKER);
        img.put(x, y + 1, MARKER);
    }
    img
}

/// Writes the binary P6 file.
pub fn write_ppm(path: &Path, img: &Image) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    write!(file, "P6\n{} {}\n255\n", img.width, img.height)?;
    file.write_all(&img.data)?;
    Ok(())
}

/// Renders the default-size diagnostic straight to a file.
pub fn render_diagnostic(
    spec: &FunctionSpec,
    part: &PartitionSpec,
    results: &[PeriodicPointResult],
    path: &Path,
) -> std::io::Result<()> {
    let img = render_image(spec, part, results, 480, 360);
    write_ppm(path, &img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use perorbit_core::enumerator::{batch_solve, generate_itineraries};
    use perorbit_core::partition::{build_partition, DomainId};
    use perorbit_core::solver::{solve_periodic, Itinerary};
    use std::f64::consts::PI;

    fn exp1() -> FunctionSpec {
        FunctionSpec::exp_family(Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn two_fixed_points_two_crosses() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let window = part.domain_window(1).unwrap();
        let its = generate_itineraries(&window, 1, false);
        let report = batch_solve(&spec, &part, &its, 1e-12, 200);
        assert_eq!(report.results.len(), 2);
        let img = render_image(&spec, &part, &report.results, 480, 360);
        assert_eq!(img.marker_pixel_count(), 2 * 5);
    }

    #[test]
    fn empty_results_shading_only() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let img = render_image(&spec, &part, &[], 120, 90);
        assert_eq!(img.marker_pixel_count(), 0);
        assert_eq!(img.data.len(), 3 * 120 * 90);
        // Shading produced something besides black.
        assert!(img.data.iter().any(|&b| b != 0));
    }

    #[test]
    fn period_three_crosses_per_result() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let mut results = Vec::new();
        for ks in [[1, 2, 3], [-1, -2, -3]] {
            let s = Itinerary::new(
                ks.iter().map(|&k| DomainId { tract: 0, branch: k }).collect(),
            )
            .unwrap();
            results.push(solve_periodic(&spec, &part, &s, 1e-12, 300).unwrap());
        }
        let img = render_image(&spec, &part, &results, 480, 360);
        assert_eq!(img.marker_pixel_count(), 2 * 3 * 5);
    }

    #[test]
    fn ppm_header_and_payload() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("diag.ppm");
        render_diagnostic(&spec, &part, &[], &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P6\n480 360\n255\n"));
        let header_len = b"P6\n480 360\n255\n".len();
        assert_eq!(bytes.len(), header_len + 3 * 480 * 360);
    }
}
