"""
Tests Package

🎓 LEARNING NOTE: Testing a Numerical Decoder
=============================================
Restoration code needs different types of tests:

1. ORACLE TESTS - compare against an independent implementation
   - DCT against an extended-precision direct sum
   - codec against Pillow
   - projection against a generic constrained optimizer

2. INVARIANT TESTS - properties that must hold for any input
   - every output re-quantizes to the coded indices
   - clipping is idempotent and non-expansive
   - hard and soft thresholding keep the same rank

3. QUALITY TESTS - slow, end-to-end (marked ``slow``)
   - soft decoding beats hard decoding on a controlled image
"""
