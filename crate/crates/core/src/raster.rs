//! Pixel rasters of membership predicates on a planar window, complement
//! components and Hausdorff distances.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0) || !(y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("degenerate window [{x0},{x1}]×[{y0},{y1}]")));
        }
        Ok(Self { x: [x0, x1], y: [y0, y1] })
    }

    /// A window for univariate rasters: the `y` extent is a dummy unit interval.
    pub fn line(x0: f64, x1: f64) -> Result<Self> {
        Self::new(x0, x1, -0.5, 0.5)
    }

    pub fn width(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn height(&self) -> f64 {
        self.y[1] - self.y[0]
    }
}

/// Flags stored row-major: `flags[iy * nx + ix]`, `iy = 0` at the bottom.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRaster {
    window: Window,
    resolution: [usize; 2],
    flags: Vec<bool>,
}

impl GridRaster {
    pub fn from_flags(window: Window, resolution: [usize; 2], flags: Vec<bool>) -> Result<Self> {
        if resolution[0] == 0 || resolution[1] == 0 || flags.len() != resolution[0] * resolution[1] {
            return Err(Error::ShapeMismatch(format!(
                "{} flags for resolution {}×{}",
                flags.len(),
                resolution[0],
                resolution[1]
            )));
        }
        Ok(Self {
            window,
            resolution,
            flags,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn resolution(&self) -> [usize; 2] {
        self.resolution
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.flags[iy * self.resolution[0] + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: bool) {
        let nx = self.resolution[0];
        self.flags[iy * nx + ix] = v;
    }

    pub fn pixel_size(&self) -> [f64; 2] {
        [
            self.window.width() / self.resolution[0] as f64,
            self.window.height() / self.resolution[1] as f64,
        ]
    }

    pub fn pixel_diagonal(&self) -> f64 {
        let [hx, hy] = self.pixel_size();
        hx.hypot(hy)
    }

    pub fn center(&self, ix: usize, iy: usize) -> [f64; 2] {
        let [hx, hy] = self.pixel_size();
        [
            self.window.x[0] + (ix as f64 + 0.5) * hx,
            self.window.y[0] + (iy as f64 + 0.5) * hy,
        ]
    }

    /// Pixel containing a point, if inside the window.
    pub fn pixel_of(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let [hx, hy] = self.pixel_size();
        let fx = (p[0] - self.window.x[0]) / hx;
        let fy = (p[1] - self.window.y[0]) / hy;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        (ix < self.resolution[0] && iy < self.resolution[1]).then_some((ix, iy))
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&b| b).count()
    }

    pub fn empty(window: Window, resolution: [usize; 2]) -> Self {
        Self {
            window,
            resolution,
            flags: vec![false; resolution[0] * resolution[1]],
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,flag\n");
        let [nx, ny] = self.resolution;
        for iy in 0..ny {
            for ix in 0..nx {
                let [x, y] = self.center(ix, iy);
                let _ = writeln!(out, "{x},{y},{}", u8::from(self.get(ix, iy)));
            }
        }
        out
    }

    pub fn from_csv(window: Window, resolution: [usize; 2], text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("x,y,flag") {
            return Err(Error::Parse("raster CSV header".into()));
        }
        let flags = lines
            .map(|l| match l.rsplit(',').next() {
                Some("1") => Ok(true),
                Some("0") => Ok(false),
                _ => Err(Error::Parse(format!("raster CSV line {l:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_flags(window, resolution, flags)
    }

    /// Filled squares for true pixels; `y` grows upward as in the window.
    pub fn to_svg(&self, overlay: &SvgOverlay) -> String {
        let [nx, ny] = self.resolution;
        let scale = (800.0 / nx.max(ny) as f64).max(1.0);
        let (w, h) = (nx as f64 * scale, ny as f64 * scale);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {nx} {ny}\">\n\
             <rect width=\"{nx}\" height=\"{ny}\" fill=\"white\"/>\n<g fill=\"black\" shape-rendering=\"crispEdges\">\n"
        );
        for iy in 0..ny {
            let row = ny - 1 - iy;
            let mut ix = 0;
            while ix < nx {
                if self.get(ix, iy) {
                    let start = ix;
                    while ix < nx && self.get(ix, iy) {
                        ix += 1;
                    }
                    let _ = writeln!(out, "<rect x=\"{start}\" y=\"{row}\" width=\"{}\" height=\"1\"/>", ix - start);
                } else {
                    ix += 1;
                }
            }
        }
        out.push_str("</g>\n");
        let to_px = |p: [f64; 2]| {
            (
                (p[0] - self.window.x[0]) / self.window.width() * nx as f64,
                (self.window.y[1] - p[1]) / self.window.height() * ny as f64,
            )
        };
        if let Some((a, b)) = overlay.line {
            let (x0, y0) = to_px(a);
            let (x1, y1) = to_px(b);
            let _ = writeln!(
                out,
                "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"red\" stroke-width=\"{}\"/>",
                nx.max(ny) as f64 / 400.0
            );
        }
        for (p, label) in &overlay.labels {
            let (x, y) = to_px(*p);
            let _ = writeln!(
                out,
                "<text x=\"{x}\" y=\"{y}\" fill=\"blue\" font-size=\"{}\">{}</text>",
                nx.max(ny) as f64 / 40.0,
                escape(label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Optional SVG decorations in window coordinates.
#[derive(Clone, Debug, Default)]
pub struct SvgOverlay {
    pub line: Option<([f64; 2], [f64; 2])>,
    pub labels: Vec<([f64; 2], String)>,
}

/// Evaluates `predicate` at every pixel center.
pub fn raster<P>(predicate: P, window: Window, resolution: [usize; 2]) -> GridRaster
where
    P: Fn([f64; 2]) -> bool + Sync,
{
    let grid = GridRaster::empty(window, resolution);
    let [nx, ny] = resolution;
    let flags: Vec<bool> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let grid = &grid;
            let predicate = &predicate;
            (0..nx).map(move |ix| predicate(grid.center(ix, iy)))
        })
        .collect();
    GridRaster {
        window,
        resolution,
        flags,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplementComponent {
    pub pixels: Vec<(usize, usize)>,
    pub representative_pixel: (usize, usize),
    pub representative: [f64; 2],
    pub touches_boundary: bool,
    pub order: Option<Vec<i64>>,
}

impl ComplementComponent {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// 4-connected components of false pixels, in order of their first pixel.
pub fn components(r: &GridRaster) -> Vec<ComplementComponent> {
    let [nx, ny] = r.resolution();
    let dist = chessboard_distance(r);
    let mut label = vec![usize::MAX; nx * ny];
    let mut out = Vec::new();
    for start in 0..nx * ny {
        if r.flags[start] || label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut pixels = Vec::new();
        let mut queue = VecDeque::from([start]);
        label[start] = id;
        let mut touches = false;
        let mut best: Option<(u64, u64, usize)> = None;
        while let Some(p) = queue.pop_front() {
            let (ix, iy) = (p % nx, p / nx);
            pixels.push((ix, iy));
            if ix == 0 || iy == 0 || ix + 1 == nx || iy + 1 == ny {
                touches = true;
            }
            let edge = ix.min(iy).min(nx - 1 - ix).min(ny - 1 - iy) as u64;
            let key = (dist[p], edge, p);
            if best.map_or(true, |b| (key.0, key.1) > (b.0, b.1)) {
                best = Some(key);
            }
            let mut push = |q: usize| {
                if !r.flags[q] && label[q] == usize::MAX {
                    label[q] = id;
                    queue.push_back(q);
                }
            };
            if ix > 0 {
                push(p - 1);
            }
            if ix + 1 < nx {
                push(p + 1);
            }
            if iy > 0 {
                push(p - nx);
            }
            if iy + 1 < ny {
                push(p + nx);
            }
        }
        let (_, _, rp) = best.expect("component is nonempty");
        let rep = (rp % nx, rp / nx);
        pixels.sort_by_key(|&(x, y)| (y, x));
        out.push(ComplementComponent {
            pixels,
            representative_pixel: rep,
            representative: r.center(rep.0, rep.1),
            touches_boundary: touches,
            order: None,
        });
    }
    out
}

/// Chessboard distance (in pixels) from each pixel to the nearest true pixel.
fn chessboard_distance(r: &GridRaster) -> Vec<u64> {
    let [nx, ny] = r.resolution();
    let inf = u64::MAX / 4;
    let mut d: Vec<u64> = r.flags.iter().map(|&b| if b { 0 } else { inf }).collect();
    let idx = |x: usize, y: usize| y * nx + x;
    for y in 0..ny {
        for x in 0..nx {
            let mut v = d[idx(x, y)];
            if x > 0 {
                v = v.min(d[idx(x - 1, y)] + 1);
            }
            if y > 0 {
                v = v.min(d[idx(x, y - 1)] + 1);
                if x > 0 {
                    v = v.min(d[idx(x - 1, y - 1)] + 1);
                }
                if x + 1 < nx {
                    v = v.min(d[idx(x + 1, y - 1)] + 1);
                }
            }
            d[idx(x, y)] = v;
        }
    }
    for y in (0..ny).rev() {
        for x in (0..nx).rev() {
            let mut v = d[idx(x, y)];
            if x + 1 < nx {
                v = v.min(d[idx(x + 1, y)] + 1);
            }
            if y + 1 < ny {
                v = v.min(d[idx(x, y + 1)] + 1);
                if x + 1 < nx {
                    v = v.min(d[idx(x + 1, y + 1)] + 1);
                }
                if x > 0 {
                    v = v.min(d[idx(x - 1, y + 1)] + 1);
                }
            }
            d[idx(x, y)] = v;
        }
    }
    d
}

/// 1D squared distance transform of Felzenszwalb and Huttenlocher with
/// sample spacing `h`.
fn dt_1d(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![f64::INFINITY; n];
    let sites: Vec<usize> = (0..n).filter(|&i| f[i].is_finite()).collect();
    if sites.is_empty() {
        return out;
    }
    let pos = |i: usize| i as f64 * h;
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    for &q in &sites {
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let s = ((f[q] + pos(q).powi(2)) - (f[p] + pos(p).powi(2))) / (2.0 * (pos(q) - pos(p)));
                    if s <= *z.last().expect("z tracks v") {
                        v.pop();
                        z.pop();
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    let mut k = 0;
    for (i, o) in out.iter_mut().enumerate() {
        while k + 1 < v.len() && z[k + 1] < pos(i) {
            k += 1;
        }
        *o = (pos(i) - pos(v[k])).powi(2) + f[v[k]];
    }
    out
}

/// Exact Euclidean distance (window units) from each pixel center to the
/// nearest true pixel center.
pub fn distance_transform(r: &GridRaster) -> Vec<f64> {
    let [nx, ny] = r.resolution();
    let [hx, hy] = r.pixel_size();
    let mut g = vec![0.0; nx * ny];
    for x in 0..nx {
        let col: Vec<f64> = (0..ny)
            .map(|y| if r.get(x, y) { 0.0 } else { f64::INFINITY })
            .collect();
        for (y, v) in dt_1d(&col, hy).into_iter().enumerate() {
            g[y * nx + x] = v;
        }
    }
    let mut d = vec![0.0; nx * ny];
    for y in 0..ny {
        let row = &g[y * nx..(y + 1) * nx];
        for (x, v) in dt_1d(row, hx).into_iter().enumerate() {
            d[y * nx + x] = v.sqrt();
        }
    }
    d
}

/// Symmetric Hausdorff distance between the true-pixel sets.
pub fn hausdorff(r1: &GridRaster, r2: &GridRaster) -> Result<f64> {
    if r1.window != r2.window || r1.resolution != r2.resolution {
        return Err(Error::ShapeMismatch("rasters on different grids".into()));
    }
    match (r1.count(), r2.count()) {
        (0, 0) => return Ok(0.0),
        (0, _) | (_, 0) => return Ok(f64::INFINITY),
        _ => {}
    }
    let directed = |a: &GridRaster, b: &GridRaster| {
        let db = distance_transform(b);
        a.flags
            .iter()
            .zip(&db)
            .filter(|(f, _)| **f)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max)
    };
    Ok(directed(r1, r2).max(directed(r2, r1)))
}
