//! C interface to `ctmg-nets`.
//!
//! Every function returns a [`CtmgStatus`]; results are written through out
//! pointers. Models and solutions are opaque handles released with their
//! `_free` functions, strings returned by the library with
//! [`ctmg_string_free`]. After a non-OK status,
//! [`ctmg_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ctmg_nets::io::parse_model;
use ctmg_nets::model::{
    build_chain_game, build_erlang, build_running_example, normalise, ChainGameParams, MarkovGame, Player,
};
use ctmg_nets::nets::{interval_count, solve, NetLevel, SolveResult, SolverConfig};
use ctmg_nets::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtmgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidModel = 4,
    StrategyMismatch = 5,
    Guard = 6,
    Numeric = 7,
    InvalidArgument = 8,
    Io = 9,
    Panic = 10,
}

/// A parsed and validated model.
pub struct CtmgModel {
    game: MarkovGame,
}

/// The outcome of [`ctmg_solve`], with strategies in the model's time scale.
pub struct CtmgSolution {
    result: SolveResult,
    reach_text: String,
    safe_text: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(error: &Error) -> CtmgStatus {
    match error {
        Error::InvalidModel(_) => CtmgStatus::InvalidModel,
        Error::Parse { .. } => CtmgStatus::Parse,
        Error::GuardExceeded { .. } => CtmgStatus::Guard,
        Error::Numeric { .. } => CtmgStatus::Numeric,
        Error::StrategyMismatch(_) => CtmgStatus::StrategyMismatch,
        Error::InvalidArgument(_) => CtmgStatus::InvalidArgument,
        Error::Io(_) => CtmgStatus::Io,
    }
}

struct Failure(CtmgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(CtmgStatus::NullPointer, format!("{name} is null"))
}

/// Runs `body`, turning errors and panics into a status code.
fn guarded(body: impl FnOnce() -> Result<(), Failure>) -> CtmgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            CtmgStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CtmgStatus::Panic
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(CtmgStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn boxed_model(game: MarkovGame) -> Result<*mut CtmgModel, Failure> {
    ctmg_nets::model::ensure_valid(&game)?;
    Ok(Box::into_raw(Box::new(CtmgModel { game })))
}

/// Parses and validates a model given as NUL-terminated text.
///
/// # Safety
/// `model_text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_model_parse(model_text: *const c_char, out: *mut *mut CtmgModel) -> CtmgStatus {
    guarded(|| {
        let game = parse_model(text(model_text, "model_text")?)?;
        write_out(out, boxed_model(game)?, "out")
    })
}

/// Reads, parses and validates a model file.
///
/// # Safety
/// `path` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_model_from_file(path: *const c_char, out: *mut *mut CtmgModel) -> CtmgStatus {
    guarded(|| {
        let game = ctmg_nets::io::read_model(std::path::Path::new(text(path, "path")?))?;
        write_out(out, boxed_model(game)?, "out")
    })
}

/// One of the built-in benchmarks with default parameters:
/// `running-example`, `erlang` or `chain-game`.
///
/// # Safety
/// `name` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_model_benchmark(name: *const c_char, out: *mut *mut CtmgModel) -> CtmgStatus {
    guarded(|| {
        let game = match text(name, "name")? {
            "running-example" => build_running_example().into_game(),
            "erlang" => build_erlang(30, 10.0)?,
            "chain-game" => build_chain_game(&ChainGameParams::default())?,
            other => return Err(Failure(CtmgStatus::InvalidArgument, format!("unknown benchmark `{other}`"))),
        };
        write_out(out, boxed_model(game)?, "out")
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ctmg_model_free(model: *mut CtmgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_model_num_locations(model: *const CtmgModel, out: *mut usize) -> CtmgStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        write_out(out, model.game.num_locations(), "out")
    })
}

/// Index of the location called `name`.
///
/// # Safety
/// `model` must be a live handle, `name` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_model_location_index(
    model: *const CtmgModel,
    name: *const c_char,
    out: *mut usize,
) -> CtmgStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let name = text(name, "name")?;
        let index = model
            .game
            .location_index(name)
            .ok_or_else(|| Failure(CtmgStatus::InvalidArgument, format!("no location `{name}`")))?;
        write_out(out, index, "out")
    })
}

/// Solves the model up to `horizon` (model time) with a net of `level`
/// (1 to 4) at precision `precision`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_solve(
    model: *const CtmgModel,
    horizon: f64,
    precision: f64,
    level: u32,
    out: *mut *mut CtmgSolution,
) -> CtmgStatus {
    guarded(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let normed = normalise(&model.game, horizon)?;
        let config = SolverConfig::with_precision(NetLevel::new(level)?, normed.horizon, precision).retain_values(false);
        let result = solve(&normed.game, &config)?;
        let lambda = normed.lambda_f64();
        let reach_text = result.reach_strategy.scaled(1.0 / lambda).to_text();
        let safe_text = result.safe_strategy.scaled(1.0 / lambda).to_text();
        write_out(out, Box::into_raw(Box::new(CtmgSolution { result, reach_text, safe_text })), "out")
    })
}

/// # Safety
/// `solution` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ctmg_solution_free(solution: *mut CtmgSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Value at time 0 of `location`.
///
/// # Safety
/// `solution` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_solution_value(
    solution: *const CtmgSolution,
    location: usize,
    out: *mut f64,
) -> CtmgStatus {
    guarded(|| {
        let solution = solution.as_ref().ok_or_else(|| null("solution"))?;
        let value = *solution.result.values.get(location).ok_or_else(|| {
            Failure(CtmgStatus::InvalidArgument, format!("location index {location} out of range"))
        })?;
        write_out(out, value, "out")
    })
}

/// Copies up to `len` values into `buffer` and stores the number of
/// locations in `written`.
///
/// # Safety
/// `buffer` must hold `len` doubles; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_solution_values(
    solution: *const CtmgSolution,
    buffer: *mut f64,
    len: usize,
    written: *mut usize,
) -> CtmgStatus {
    guarded(|| {
        let solution = solution.as_ref().ok_or_else(|| null("solution"))?;
        let values = &solution.result.values;
        if len > 0 {
            if buffer.is_null() {
                return Err(null("buffer"));
            }
            let n = len.min(values.len());
            ptr::copy_nonoverlapping(values.as_ptr(), buffer, n);
        }
        write_out(written, values.len(), "written")
    })
}

/// Guaranteed global error bound of the values.
///
/// # Safety
/// `solution` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_solution_bound(solution: *const CtmgSolution, out: *mut f64) -> CtmgStatus {
    guarded(|| {
        let solution = solution.as_ref().ok_or_else(|| null("solution"))?;
        write_out(out, solution.result.value_bound, "out")
    })
}

/// Number of intervals and their width in normed time.
///
/// # Safety
/// `solution` must be a live handle; both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_solution_grid(
    solution: *const CtmgSolution,
    intervals: *mut u64,
    epsilon: *mut f64,
) -> CtmgStatus {
    guarded(|| {
        let solution = solution.as_ref().ok_or_else(|| null("solution"))?;
        write_out(intervals, solution.result.intervals, "intervals")?;
        write_out(epsilon, solution.result.epsilon, "epsilon")
    })
}

/// Strategy of player `'R'` or `'S'` in the text format. Release the string
/// with [`ctmg_string_free`].
///
/// # Safety
/// `solution` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_solution_strategy(
    solution: *const CtmgSolution,
    player: c_char,
    out: *mut *mut c_char,
) -> CtmgStatus {
    guarded(|| {
        let solution = solution.as_ref().ok_or_else(|| null("solution"))?;
        let symbol = (player as u8 as char).to_string();
        let text = match Player::from_symbol(&symbol) {
            Some(Player::Reach) => &solution.reach_text,
            Some(Player::Safe) => &solution.safe_text,
            None => return Err(Failure(CtmgStatus::InvalidArgument, format!("unknown player `{symbol}`"))),
        };
        let c = CString::new(text.as_str()).expect("strategy text has no NUL");
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ctmg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of uniform intervals level `level` needs for precision
/// `precision` over `horizon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctmg_interval_count(level: u32, horizon: f64, precision: f64, out: *mut u64) -> CtmgStatus {
    guarded(|| {
        let n = interval_count(NetLevel::new(level)?, horizon, precision)?;
        write_out(out, n, "out")
    })
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ctmg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
