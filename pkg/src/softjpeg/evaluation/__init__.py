"""
Evaluation for softjpeg: image quality metrics and the hard-vs-soft benchmark.

🎓 LEARNING NOTE: Measuring restoration
- PSNR: 10·log10(255² / MSE), sensitive to any pixel error
- SSIM: local structure agreement, closer to what a viewer notices
- Both are computed on the luma channel by default
"""
