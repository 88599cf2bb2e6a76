//! Arithmetic in GF(2^8) and in its degree-3 extension GF(2^24).
//!
//! ```text
//! cargo run --example field_arithmetic
//! ```

use evss::gf_base::BaseField;
use evss::gf_ext::ExtField;

fn main() -> evss::Result<()> {
    let f = BaseField::new(8)?;
    println!("GF(2^8) modulus: {}", f.modulus());

    let a = f.elem(0x57)?;
    let b = f.elem(0x83)?;
    let p = f.mul(a, b)?;
    println!("{a} * {b} = {p}");
    println!("{a} + {b} = {}", f.add(a, b)?);
    println!("1 / {a} = {}", f.inv(a)?);
    assert_eq!(f.div(p, b)?, a);

    let ext = ExtField::new(8, 3)?;
    println!("GF(2^24) modulus over GF(2^8): {}", ext.modulus());
    let x = ext.point(0x01_02_03)?;
    let y = ext.point(0xff_00_10)?;
    let xy = ext.mul(&x, &y)?;
    println!("x = {x}\ny = {y}\nx * y = {xy}");
    assert_eq!(ext.div(&xy, &y)?, x);

    // The base field sits inside the extension as the constants.
    let c = ext.embed_base(a)?;
    assert_eq!(ext.proj_const(&c)?, a);
    println!("embed({a}) = {c}, projects back to {}", ext.proj_const(&c)?);
    Ok(())
}
