//! Discretized flow on a toy Fock space.
//!
//! Time is cut into slots of width dt; each slot carries the local space
//! C ⊕ C^d (vacuum plus one particle per noise mode). One slot evolves by the
//! exponential of the skew-Hermitian block generator on h ⊗ (C ⊕ C^d)
//!
//!   X = [ iH·dt      −L_k†·√dt ]
//!       [ L_j·√dt        0     ]
//!
//! (a quantum-random-walk step in the style of repeated interactions), and
//! the flow over [a,b) is the ordered product of per-slot steps. Unitarity
//! and the evolution law V_{[a,c)} = V_{[a,b)}·V_{[b,c)} then hold exactly,
//! leaving the generator mismatch as the single O(dt) error channel against
//! the continuous-time semigroups.
//!
//! The flow is kept in factored form: applying it to vectors costs
//! O(n_slots · dim) and the huge dense unitary is only materialized on
//! explicit request, under a cap.

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::model::ModelSpec;
use crate::operator::{C64, HVector, I, ONE, Operator, ZERO, slice};

/// Coefficient table of the flow equation: time drift G, creation
/// coefficients L_j, annihilation coefficients −L_k†. The gauge block is
/// identically zero (no Poisson terms), which is what makes the process
/// Gaussian.
#[derive(Debug, Clone)]
pub struct HPCoefficients {
    /// Coefficient of dt: G = iH − ½ Σ L_k†L_k.
    pub time: Operator,
    /// Coefficients of the creation increments, one per noise mode.
    pub creation: Vec<Operator>,
    /// Coefficients of the annihilation increments, always −L_k†.
    pub annihilation: Vec<Operator>,
}

impl HPCoefficients {
    /// Residual of the unitarity condition L00 + L00† + Σ L_k†L_k = 0.
    pub fn unitarity_defect(&self) -> f64 {
        let mut acc = self.time.add(&self.time.adjoint());
        for l in &self.creation {
            acc = acc.add(&l.adjoint().mul(l));
        }
        acc.frobenius_norm()
    }
}

pub fn assemble_coefficients(model: &ModelSpec) -> HPCoefficients {
    let time = crate::semigroup::build_g(model);
    let creation: Vec<Operator> = model.couplings().to_vec();
    let annihilation = creation.iter().map(|l| l.adjoint().scale(-ONE)).collect();
    HPCoefficients {
        time,
        creation,
        annihilation,
    }
}

pub const DEFAULT_MAX_SLOTS: usize = 12;
/// Cap on the state dimension dim_h·(1+d)^{n_slots}, in complex entries.
pub const DEFAULT_MEMORY_CAP: usize = 2_000_000;
/// Cap on materialized dense operators, in complex entries.
pub const DEFAULT_DENSE_CAP: usize = 4_194_304;

/// Discretization parameters: slot count, slot width and noise dimension.
/// The per-slot local dimension is fixed at 1 + d.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyFockConfig {
    pub n_slots: usize,
    pub dt: f64,
    pub d: usize,
    pub max_slots: usize,
    pub memory_cap: usize,
    pub dense_cap: usize,
}

impl ToyFockConfig {
    pub fn new(n_slots: usize, dt: f64, d: usize) -> Result<Self> {
        let config = ToyFockConfig {
            n_slots,
            dt,
            d,
            max_slots: DEFAULT_MAX_SLOTS,
            memory_cap: DEFAULT_MEMORY_CAP,
            dense_cap: DEFAULT_DENSE_CAP,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_max_slots(mut self, max_slots: usize) -> Result<Self> {
        self.max_slots = max_slots;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_slots == 0 || self.n_slots > self.max_slots {
            return Err(Error::TooManySlots {
                n_slots: self.n_slots,
                max_slots: self.max_slots,
            });
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidStep { dt: self.dt });
        }
        Ok(())
    }

    pub fn local_dim(&self) -> usize {
        1 + self.d
    }

    pub fn horizon(&self) -> f64 {
        self.n_slots as f64 * self.dt
    }

    fn state_dim(&self, dim_h: usize) -> Result<usize> {
        let fock: usize = self
            .local_dim()
            .checked_pow(self.n_slots as u32)
            .ok_or(Error::MemoryCap {
                required: usize::MAX,
                cap: self.memory_cap,
            })?;
        let dim = fock.checked_mul(dim_h).ok_or(Error::MemoryCap {
            required: usize::MAX,
            cap: self.memory_cap,
        })?;
        if dim > self.memory_cap {
            return Err(Error::MemoryCap {
                required: dim,
                cap: self.memory_cap,
            });
        }
        Ok(dim)
    }
}

/// One-slot unitary: exp of the skew-Hermitian block generator on
/// h ⊗ (C ⊕ C^d). The vacuum-vacuum block of the result is
/// I + G·dt + O(dt²).
pub fn step_unitary(model: &ModelSpec, dt: f64) -> Result<Operator> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep { dt });
    }
    let dh = model.dim_h();
    let d = model.noise_dim();
    let local = 1 + d;
    let n = dh * local;
    let sqrt_dt = dt.sqrt();
    let mut x = Operator::zeros(n, n);
    let h = model.hamiltonian();
    for a in 0..dh {
        for b in 0..dh {
            let hv = h.get(a, b);
            if hv != ZERO {
                x.set(a * local, b * local, I * hv * dt);
            }
        }
    }
    for (k, l) in model.couplings().iter().enumerate() {
        let mode = k + 1;
        let ld = l.adjoint();
        for a in 0..dh {
            for b in 0..dh {
                let lv = l.get(a, b);
                if lv != ZERO {
                    // one-particle(k) <- vacuum
                    x.set(a * local + mode, b * local, lv * sqrt_dt);
                }
                let lda = ld.get(a, b);
                if lda != ZERO {
                    // vacuum <- one-particle(k)
                    x.set(a * local, b * local + mode, -lda * sqrt_dt);
                }
            }
        }
    }
    expm(&x)
}

/// Extracts the vacuum-vacuum block of a one-slot unitary.
fn vacuum_block(step: &Operator, dim_h: usize, local: usize) -> Operator {
    let mut s = Operator::zeros(dim_h, dim_h);
    for a in 0..dim_h {
        for b in 0..dim_h {
            s.set(a, b, step.get(a * local, b * local));
        }
    }
    s
}

/// Discretized flow over a slot range, kept as an ordered product of
/// identical per-slot steps. State layout is [h, s_1, ..., s_n] row-major
/// with h slowest.
#[derive(Debug, Clone)]
pub struct FlowState {
    config: ToyFockConfig,
    dim_h: usize,
    step: Operator,
    s_block: Operator,
    start: usize,
    end: usize,
}

impl FlowState {
    /// Flow over all configured slots.
    pub fn evolve(model: &ModelSpec, config: &ToyFockConfig) -> Result<FlowState> {
        Self::evolve_range(model, config, 0, config.n_slots)
    }

    /// Flow over the slot range [start, end) inside the configured horizon.
    pub fn evolve_range(
        model: &ModelSpec,
        config: &ToyFockConfig,
        start: usize,
        end: usize,
    ) -> Result<FlowState> {
        config.validate()?;
        if model.noise_dim() != config.d {
            return Err(Error::DimensionMismatch {
                context: "FlowState::evolve",
                expected: format!("noise dimension {}", config.d),
                actual: format!("{}", model.noise_dim()),
            });
        }
        if start > end || end > config.n_slots {
            return Err(Error::SlotRange {
                start,
                end,
                n_slots: config.n_slots,
            });
        }
        config.state_dim(model.dim_h())?;
        let step = step_unitary(model, config.dt)?;
        let s_block = vacuum_block(&step, model.dim_h(), config.local_dim());
        Ok(FlowState {
            config: config.clone(),
            dim_h: model.dim_h(),
            step,
            s_block,
            start,
            end,
        })
    }

    pub fn config(&self) -> &ToyFockConfig {
        &self.config
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    /// Per-slot unitary on h ⊗ (C ⊕ C^d).
    pub fn step(&self) -> &Operator {
        &self.step
    }

    /// One-step vacuum compression S; ‖S‖_op ≤ 1.
    pub fn s_block(&self) -> &Operator {
        &self.s_block
    }

    pub fn slot_range(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    /// Dimension of the carrier h ⊗ (slot space)^{n_slots}.
    pub fn full_dim(&self) -> usize {
        let local = self.config.local_dim();
        self.dim_h * local.pow(self.config.n_slots as u32)
    }

    /// Applies the step (or its adjoint) on the pair (h, slot i), in place.
    fn apply_step_on(&self, state: &mut [C64], slot: usize, adjoint: bool) {
        let local = self.config.local_dim();
        let n = self.config.n_slots;
        let m = self.dim_h * local;
        // Strides in the [h, s_1 .. s_n] layout.
        let suffix = local.pow((n - 1 - slot) as u32);
        let prefix = local.pow(slot as u32);
        let h_stride = prefix * local * suffix;
        let mut gathered = vec![ZERO; m];
        let mut transformed = vec![ZERO; m];
        let w = self.step.entries();
        for pre in 0..prefix {
            for suf in 0..suffix {
                let base = pre * local * suffix + suf;
                for a in 0..self.dim_h {
                    for c in 0..local {
                        gathered[a * local + c] = state[a * h_stride + c * suffix + base];
                    }
                }
                for (row, t) in transformed.iter_mut().enumerate() {
                    let mut acc = ZERO;
                    if adjoint {
                        for (col, g) in gathered.iter().enumerate() {
                            acc += w[col * m + row].conj() * g;
                        }
                    } else {
                        let off = row * m;
                        for (col, g) in gathered.iter().enumerate() {
                            acc += w[off + col] * g;
                        }
                    }
                    *t = acc;
                }
                for a in 0..self.dim_h {
                    for c in 0..local {
                        state[a * h_stride + c * suffix + base] = transformed[a * local + c];
                    }
                }
            }
        }
    }

    /// V x through the ordered product of steps.
    pub fn apply(&self, state: &mut [C64]) {
        assert_eq!(state.len(), self.full_dim(), "state dimension mismatch");
        for slot in (self.start..self.end).rev() {
            self.apply_step_on(state, slot, false);
        }
    }

    /// V† x.
    pub fn apply_adjoint(&self, state: &mut [C64]) {
        assert_eq!(state.len(), self.full_dim(), "state dimension mismatch");
        for slot in self.start..self.end {
            self.apply_step_on(state, slot, true);
        }
    }

    /// Concatenates two flows over adjacent ranges; the evolution law holds
    /// bit-exactly because evaluation replays the same ordered product.
    pub fn compose(&self, later: &FlowState) -> Result<FlowState> {
        if self.config != later.config || self.step != later.step || self.end != later.start {
            return Err(Error::InvalidConfig(
                "compose requires the same discretization and adjacent slot ranges".into(),
            ));
        }
        let mut merged = self.clone();
        merged.end = later.end;
        Ok(merged)
    }

    /// Materializes the dense unitary, column by column, under the cap.
    pub fn dense(&self) -> Result<Operator> {
        let dim = self.full_dim();
        let required = dim.checked_mul(dim).ok_or(Error::MemoryCap {
            required: usize::MAX,
            cap: self.config.dense_cap,
        })?;
        if required > self.config.dense_cap {
            return Err(Error::MemoryCap {
                required,
                cap: self.config.dense_cap,
            });
        }
        let mut out = Operator::zeros(dim, dim);
        let mut column = vec![ZERO; dim];
        for j in 0..dim {
            column.iter_mut().for_each(|c| *c = ZERO);
            column[j] = ONE;
            self.apply(&mut column);
            for i in 0..dim {
                if column[i] != ZERO {
                    out.set(i, j, column[i]);
                }
            }
        }
        Ok(out)
    }

    /// ‖V†V − I‖_F computed matrix-free over all basis columns.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.full_dim();
        let mut total = 0.0_f64;
        let mut column = vec![ZERO; dim];
        for j in 0..dim {
            column.iter_mut().for_each(|c| *c = ZERO);
            column[j] = ONE;
            self.apply(&mut column);
            self.apply_adjoint(&mut column);
            column[j] -= ONE;
            total += column.iter().map(|c| c.norm_sqr()).sum::<f64>();
        }
        total.sqrt()
    }

    /// ⟨u, S^{n_steps} v⟩: the exact vacuum-sector compression of the flow.
    /// Converges to ⟨u, T_t v⟩ at first order in dt for fixed t = n·dt.
    pub fn vacuum_expectation(&self, u: &HVector, v: &HVector, n_steps: usize) -> Result<C64> {
        if n_steps > self.config.n_slots {
            return Err(Error::SlotRange {
                start: 0,
                end: n_steps,
                n_slots: self.config.n_slots,
            });
        }
        if u.dim() != self.dim_h || v.dim() != self.dim_h {
            return Err(Error::DimensionMismatch {
                context: "vacuum_expectation",
                expected: format!("vectors of dim {}", self.dim_h),
                actual: format!("{} and {}", u.dim(), v.dim()),
            });
        }
        let mut w = v.clone();
        for _ in 0..n_steps {
            w = self.s_block.apply(&w);
        }
        Ok(u.inner(&w))
    }

    /// Tr_Γ[V†(ρ ⊗ |Ω⟩⟨Ω|)V], the adjoint-flow compression.
    pub fn compress_adjoint(&self, rho: &Operator) -> Result<Operator> {
        if rho.rows() != self.dim_h || rho.cols() != self.dim_h {
            return Err(Error::DimensionMismatch {
                context: "compress_adjoint",
                expected: format!("{0}x{0}", self.dim_h),
                actual: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let dim = self.full_dim();
        let fock = dim / self.dim_h;
        let mut sheets: Vec<Vec<C64>> = Vec::with_capacity(self.dim_h);
        for i in 0..self.dim_h {
            let mut state = vec![ZERO; dim];
            state[i * fock] = ONE; // e_i ⊗ Ω
            self.apply_adjoint(&mut state);
            sheets.push(state);
        }
        let mut out = Operator::zeros(self.dim_h, self.dim_h);
        for a in 0..self.dim_h {
            for b in 0..self.dim_h {
                let mut acc = ZERO;
                for i in 0..self.dim_h {
                    for j in 0..self.dim_h {
                        let rij = rho.get(i, j);
                        if rij == ZERO {
                            continue;
                        }
                        let mut overlap = ZERO;
                        let si = &sheets[i][a * fock..(a + 1) * fock];
                        let sj = &sheets[j][b * fock..(b + 1) * fock];
                        for f in 0..fock {
                            overlap += si[f] * sj[f].conj();
                        }
                        acc += rij * overlap;
                    }
                }
                out.set(a, b, acc);
            }
        }
        Ok(out)
    }

    /// Compression of V_{[a,b)} by u, v on the initial space: an operator
    /// supported on the slots [a,b) only; disjoint supports commute exactly.
    pub fn slice_flow(&self, a: usize, b: usize, u: &HVector, v: &HVector) -> Result<SlotOperator> {
        if a > b || a < self.start || b > self.end {
            return Err(Error::SlotRange {
                start: a,
                end: b,
                n_slots: self.config.n_slots,
            });
        }
        if a == b {
            let mut m = Operator::zeros(1, 1);
            m.set(0, 0, u.inner(v));
            return Ok(SlotOperator {
                start: a,
                end: b,
                local_dim: self.config.local_dim(),
                matrix: m,
            });
        }
        let len = b - a;
        let local = self.config.local_dim();
        let sub_dim = self.dim_h * local.pow(len as u32);
        let required = sub_dim * sub_dim;
        if required > self.config.dense_cap {
            return Err(Error::MemoryCap {
                required,
                cap: self.config.dense_cap,
            });
        }
        // The sub-flow over [a,b) relabeled to its own slots; the step matrix
        // is slot-independent so this is the same operator.
        let sub_config = ToyFockConfig {
            n_slots: len,
            dt: self.config.dt,
            d: self.config.d,
            max_slots: self.config.max_slots.max(len),
            memory_cap: self.config.memory_cap,
            dense_cap: self.config.dense_cap,
        };
        let sub = FlowState {
            config: sub_config,
            dim_h: self.dim_h,
            step: self.step.clone(),
            s_block: self.s_block.clone(),
            start: 0,
            end: len,
        };
        let dense = sub.dense()?;
        let matrix = slice(&dense, self.dim_h, local.pow(len as u32), u, v)?;
        Ok(SlotOperator {
            start: a,
            end: b,
            local_dim: local,
            matrix,
        })
    }

    /// ⟨Ω, Π_k slice(interval_k, u_k, v_k) Ω⟩ with the product applied
    /// right-to-left on the union of touched slots. For pairwise-disjoint
    /// intervals this factorizes exactly into Π_k ⟨u_k, S^{len_k} v_k⟩.
    pub fn correlation(&self, specs: &[(usize, usize, HVector, HVector)]) -> Result<C64> {
        let mut slices = Vec::with_capacity(specs.len());
        for (a, b, u, v) in specs {
            slices.push(self.slice_flow(*a, *b, u, v)?);
        }
        correlation_of_slices(&slices, self.config.local_dim(), self.config.memory_cap)
    }
}

/// Operator acting on a contiguous run of Fock slots, identity elsewhere.
#[derive(Debug, Clone)]
pub struct SlotOperator {
    start: usize,
    end: usize,
    local_dim: usize,
    matrix: Operator,
}

impl SlotOperator {
    pub fn slots(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    /// Dense form on the slot hull [hull_start, hull_end), padding with
    /// identities.
    pub fn ampliate(&self, hull_start: usize, hull_end: usize) -> Result<Operator> {
        if hull_start > self.start || hull_end < self.end {
            return Err(Error::SlotRange {
                start: self.start,
                end: self.end,
                n_slots: hull_end,
            });
        }
        let left = Operator::identity(self.local_dim.pow((self.start - hull_start) as u32));
        let right = Operator::identity(self.local_dim.pow((hull_end - self.end) as u32));
        Ok(crate::operator::tensor(
            &crate::operator::tensor(&left, &self.matrix),
            &right,
        ))
    }

    /// Applies to a vector over the compact slot list `axes` (sorted slot
    /// indices of the carrier); this operator's slots must appear in it.
    fn apply_compact(&self, state: &mut [C64], axes: &[usize]) {
        if self.start == self.end {
            let c = self.matrix.get(0, 0);
            state.iter_mut().for_each(|x| *x *= c);
            return;
        }
        let pos = axes
            .iter()
            .position(|&s| s == self.start)
            .expect("slice slots must be in the carrier");
        let len = self.end - self.start;
        let m = self.local_dim.pow(len as u32);
        let suffix = self.local_dim.pow((axes.len() - pos - len) as u32);
        let prefix = state.len() / (m * suffix);
        let w = self.matrix.entries();
        let mut gathered = vec![ZERO; m];
        for pre in 0..prefix {
            for suf in 0..suffix {
                let base = pre * m * suffix + suf;
                for k in 0..m {
                    gathered[k] = state[base + k * suffix];
                }
                for row in 0..m {
                    let mut acc = ZERO;
                    let off = row * m;
                    for (col, g) in gathered.iter().enumerate() {
                        acc += w[off + col] * g;
                    }
                    state[base + row * suffix] = acc;
                }
            }
        }
    }
}

/// Vacuum expectation of an ordered product of slot operators, evaluated on
/// the compact union of their supports.
pub fn correlation_of_slices(
    slices: &[SlotOperator],
    local_dim: usize,
    memory_cap: usize,
) -> Result<C64> {
    let mut axes: Vec<usize> = Vec::new();
    for s in slices {
        for slot in s.start..s.end {
            if !axes.contains(&slot) {
                axes.push(slot);
            }
        }
    }
    axes.sort_unstable();
    let dim = local_dim
        .checked_pow(axes.len() as u32)
        .filter(|&d| d <= memory_cap)
        .ok_or(Error::MemoryCap {
            required: usize::MAX,
            cap: memory_cap,
        })?;
    let mut state = vec![ZERO; dim.max(1)];
    state[0] = ONE; // all-vacuum
    for s in slices.iter().rev() {
        s.apply_compact(&mut state, &axes);
    }
    Ok(state[0])
}

/// Finite-difference probe of the two-fold product semigroup over one shared
/// slot: (M_dt − I)/dt with ⟨u⊗p, M_dt v⊗w⟩ = ⟨Ω, V(u,v)V(p,w)Ω⟩.
/// Converges to the closed-form product generator at first order in dt.
pub fn two_point_rate(model: &ModelSpec, dt: f64) -> Result<Operator> {
    let dh = model.dim_h();
    let local = 1 + model.noise_dim();
    let step = step_unitary(model, dt)?;
    // All basis slices of the one-slot unitary.
    let mut slices = Vec::with_capacity(dh * dh);
    for a in 0..dh {
        for b in 0..dh {
            slices.push(slice(
                &step,
                dh,
                local,
                &HVector::basis(dh, a),
                &HVector::basis(dh, b),
            )?);
        }
    }
    let dim = dh * dh;
    let mut m = Operator::zeros(dim, dim);
    for a in 0..dh {
        for p in 0..dh {
            for b in 0..dh {
                for w in 0..dh {
                    let first = &slices[a * dh + b];
                    let second = &slices[p * dh + w];
                    let mut acc = ZERO;
                    for c in 0..local {
                        acc += first.get(0, c) * second.get(c, 0);
                    }
                    m.set(a * dh + p, b * dh + w, acc);
                }
            }
        }
    }
    let id = Operator::identity(dim);
    Ok(m.sub(&id).scale(C64::new(1.0 / dt, 0.0)))
}

/// Scaled third-order increment correlation over one slot:
/// (1/dt)·⟨Ω, Π_i (V_dt^{(ε_i)} − 1)(u_i, v_i) Ω⟩. Under the zero gauge
/// block this decays with dt, which is the Gaussian signature of the noise.
pub fn gaussian_triple_probe(
    model: &ModelSpec,
    dt: f64,
    inputs: &[(HVector, HVector, u8); 3],
) -> Result<C64> {
    let dh = model.dim_h();
    let local = 1 + model.noise_dim();
    let step = step_unitary(model, dt)?;
    let step_adj = step.adjoint();
    let id = Operator::identity(local);
    let mut product = Operator::identity(local);
    for (u, v, eps) in inputs {
        let base = if *eps == 0 { &step } else { &step_adj };
        let sliced = slice(base, dh, local, u, v)?;
        let centered = sliced.sub(&id.scale(u.inner(v)));
        product = product.mul(&centered);
    }
    Ok(product.get(0, 0) / C64::new(dt, 0.0))
}
