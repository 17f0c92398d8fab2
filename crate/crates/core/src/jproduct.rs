//! Join products of small dense tensors.
//!
//! A join multiplies two tensors entrywise along their shared (repeated)
//! indices without summing over them. The repeated indices survive once in the
//! output as *family* axes: they enumerate an indexed family of tensors rather
//! than acting as tensor indices. Summing the family axes away afterwards
//! recovers the ordinary contracted product.
//!
//! Axis order of `join(a, b, r)`: the axes of `a` in order (repeated ones now
//! flagged as family axes), followed by the non-repeated axes of `b`. So for
//! matrices `A_pq` and `B_qr` joined on `q` the result is `C_p(q)r`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Contra,
    Co,
}

impl Variance {
    pub fn flipped(self) -> Self {
        match self {
            Variance::Contra => Variance::Co,
            Variance::Co => Variance::Contra,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub name: String,
    pub dim: usize,
    pub variance: Variance,
    /// Retained join index: labels a member of an indexed family.
    pub family: bool,
}

impl Axis {
    pub fn new(name: &str, dim: usize, variance: Variance) -> Self {
        Self {
            name: name.to_string(),
            dim,
            variance,
            family: false,
        }
    }
}

/// Dense row-major tensor with named axes. Operands are rank <= 4; joins may
/// produce more axes once family axes are counted.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    axes: Vec<Axis>,
    data: Vec<Complex64>,
}

/// The result of a join: a tensor whose family axes enumerate its members.
pub type IndexedFamily = Tensor;

pub const MAX_OPERAND_RANK: usize = 4;

impl Tensor {
    pub fn new(axes: Vec<Axis>, data: Vec<Complex64>) -> Result<Self> {
        let size: usize = axes.iter().map(|a| a.dim).product();
        if size != data.len() {
            return Err(Error::Dimension {
                expected: size,
                found: data.len(),
            });
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::validation(format!("duplicate axis label `{}`", a.name)));
            }
        }
        Ok(Self { axes, data })
    }

    pub fn from_fn(axes: Vec<Axis>, f: impl Fn(&[usize]) -> Complex64) -> Result<Self> {
        let dims: Vec<usize> = axes.iter().map(|a| a.dim).collect();
        let size = dims.iter().product();
        let mut data = Vec::with_capacity(size);
        let mut idx = vec![0; dims.len()];
        for _ in 0..size {
            data.push(f(&idx));
            advance(&mut idx, &dims);
        }
        Self::new(axes, data)
    }

    pub fn scalar(v: Complex64) -> Self {
        Self {
            axes: Vec::new(),
            data: vec![v],
        }
    }

    pub fn vector(name: &str, variance: Variance, data: Vec<Complex64>) -> Self {
        let axes = vec![Axis::new(name, data.len(), variance)];
        Self { axes, data }
    }

    /// A matrix as a mixed tensor: row index contravariant, column covariant.
    pub fn matrix(row: &str, col: &str, m: &CMatrix) -> Result<Self> {
        let axes = vec![
            Axis::new(row, m.nrows(), Variance::Contra),
            Axis::new(col, m.ncols(), Variance::Co),
        ];
        Self::from_fn(axes, |ix| m[(ix[0], ix[1])])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.dim).collect()
    }

    /// Number of tensorial (non-family) axes.
    pub fn rank(&self) -> usize {
        self.axes.iter().filter(|a| !a.family).count()
    }

    pub fn family_rank(&self) -> usize {
        self.axes.len() - self.rank()
    }

    pub fn axis_position(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    fn strides(&self) -> Vec<usize> {
        strides(&self.dims())
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        let off: usize = idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum();
        self.data[off]
    }

    pub fn relabel(mut self, from: &str, to: &str) -> Result<Self> {
        if self.axis_position(to).is_some() {
            return Err(Error::validation(format!("label `{to}` already present")));
        }
        let pos = self
            .axis_position(from)
            .ok_or_else(|| Error::validation(format!("no axis `{from}`")))?;
        self.axes[pos].name = to.to_string();
        Ok(self)
    }

    /// Raises or lowers one index.
    pub fn with_variance(mut self, name: &str, variance: Variance) -> Result<Self> {
        let pos = self
            .axis_position(name)
            .ok_or_else(|| Error::validation(format!("no axis `{name}`")))?;
        self.axes[pos].variance = variance;
        Ok(self)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            axes: self.axes.clone(),
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// Entrywise sum of two tensors with identical axes.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.axes != other.axes {
            return Err(Error::validation("cannot add tensors with different axes"));
        }
        Ok(Self {
            axes: self.axes.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest entrywise modulus of the difference, comparing by position only.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dims(), other.dims(), "shapes differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Member of a family: fixes the family axis `name` at `value`.
    pub fn family_member(&self, name: &str, value: usize) -> Result<Self> {
        let pos = self
            .axis_position(name)
            .filter(|&p| self.axes[p].family)
            .ok_or_else(|| Error::validation(format!("no family axis `{name}`")))?;
        if value >= self.axes[pos].dim {
            return Err(Error::Dimension {
                expected: self.axes[pos].dim,
                found: value + 1,
            });
        }
        let mut axes = self.axes.clone();
        axes.remove(pos);
        Self::from_fn(axes, |ix| {
            let mut full = ix.to_vec();
            full.insert(pos, value);
            self.get(&full)
        })
    }

    /// Rank-2 tensor without family axes as a matrix.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.axes.len() != 2 {
            return Err(Error::validation("tensor is not a matrix"));
        }
        let (r, c) = (self.axes[0].dim, self.axes[1].dim);
        Ok(CMatrix::from_fn(r, c, |i, j| self.data[i * c + j]))
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn advance(idx: &mut [usize], dims: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Join product of `a` and `b` over the `repeated` indices.
pub fn join(a: &Tensor, b: &Tensor, repeated: &[&str]) -> Result<IndexedFamily> {
    for (t, which) in [(a, "left"), (b, "right")] {
        if t.rank() > MAX_OPERAND_RANK {
            return Err(Error::Unsupported(format!(
                "{which} operand has rank {}, at most {MAX_OPERAND_RANK} supported",
                t.rank()
            )));
        }
    }
    let mut a_pos = Vec::with_capacity(repeated.len());
    let mut b_pos = Vec::with_capacity(repeated.len());
    for &r in repeated {
        let pa = a
            .axis_position(r)
            .ok_or_else(|| Error::validation(format!("index `{r}` not found in left operand")))?;
        let pb = b
            .axis_position(r)
            .ok_or_else(|| Error::validation(format!("index `{r}` not found in right operand")))?;
        let (xa, xb) = (&a.axes[pa], &b.axes[pb]);
        if xa.family || xb.family {
            return Err(Error::validation(format!(
                "index `{r}` is already a family index"
            )));
        }
        if xa.variance == xb.variance {
            return Err(Error::validation(format!(
                "index `{r}` must be covariant in one operand and contravariant in the other"
            )));
        }
        if xa.dim != xb.dim {
            return Err(Error::Dimension {
                expected: xa.dim,
                found: xb.dim,
            });
        }
        a_pos.push(pa);
        b_pos.push(pb);
    }

    let mut axes: Vec<Axis> = a.axes.clone();
    for &p in &a_pos {
        axes[p].family = true;
    }
    let b_free: Vec<usize> = (0..b.axes.len()).filter(|p| !b_pos.contains(p)).collect();
    for &p in &b_free {
        if axes.iter().any(|x| x.name == b.axes[p].name) {
            return Err(Error::validation(format!(
                "index `{}` appears in both operands but is not joined",
                b.axes[p].name
            )));
        }
        axes.push(b.axes[p].clone());
    }

    let na = a.axes.len();
    let b_strides = b.strides();
    let a_strides = a.strides();
    Tensor::from_fn(axes, |ix| {
        let a_off: usize = ix[..na].iter().zip(&a_strides).map(|(i, s)| i * s).sum();
        let mut b_off = 0;
        for (k, &p) in b_pos.iter().enumerate() {
            b_off += ix[a_pos[k]] * b_strides[p];
        }
        for (k, &p) in b_free.iter().enumerate() {
            b_off += ix[na + k] * b_strides[p];
        }
        a.data[a_off] * b.data[b_off]
    })
}

/// Sums out every family axis.
pub fn contract(fam: &IndexedFamily) -> Tensor {
    let names: Vec<String> = fam
        .axes
        .iter()
        .filter(|a| a.family)
        .map(|a| a.name.clone())
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    contract_over(fam, &refs).expect("family axes exist")
}

/// Sums out the named family axes, keeping any others.
pub fn contract_over(fam: &IndexedFamily, names: &[&str]) -> Result<Tensor> {
    let mut summed = Vec::with_capacity(names.len());
    for &n in names {
        let p = fam
            .axis_position(n)
            .filter(|&p| fam.axes[p].family)
            .ok_or_else(|| Error::validation(format!("no family axis `{n}`")))?;
        summed.push(p);
    }
    let kept: Vec<usize> = (0..fam.axes.len()).filter(|p| !summed.contains(p)).collect();
    let out_axes: Vec<Axis> = kept.iter().map(|&p| fam.axes[p].clone()).collect();
    let out_dims: Vec<usize> = out_axes.iter().map(|a| a.dim).collect();
    let out_strides = strides(&out_dims);
    let mut data = vec![Complex64::new(0.0, 0.0); out_dims.iter().product()];
    let dims = fam.dims();
    let mut idx = vec![0; dims.len()];
    for v in &fam.data {
        let off: usize = kept
            .iter()
            .zip(&out_strides)
            .map(|(&p, s)| idx[p] * s)
            .sum();
        data[off] += v;
        advance(&mut idx, &dims);
    }
    Tensor::new(out_axes, data)
}

/// Ordinary contracted product: join followed by summation over `repeated`.
pub fn tensor_product(a: &Tensor, b: &Tensor, repeated: &[&str]) -> Result<Tensor> {
    contract_over(&join(a, b, repeated)?, repeated)
}

/// Reverses the axis order: `C^T_{kji} = C_{ijk}`.
pub fn transpose(t: &Tensor) -> Tensor {
    let mut axes = t.axes.clone();
    axes.reverse();
    let k = axes.len();
    Tensor::from_fn(axes, |ix| {
        let rev: Vec<usize> = (0..k).map(|i| ix[k - 1 - i]).collect();
        t.get(&rev)
    })
    .expect("transpose preserves size")
}
